#include "bdglab/operators.hpp"

#include <cmath>
#include <numbers>

#include "bdglab/errors.hpp"

namespace bdg {

namespace {

constexpr double kHermTol = 1e-12;

// Link phase data for one hop direction across the whole grid.
struct LinkTable {
  // column p: hop from site p to site target(p) with amplitude phase(p)
  Eigen::VectorXi target;
  Eigen::VectorXcd phase;  // e^{-i theta} * boundary twist
};

LinkTable build_links(const Grid& grid, const VectorPotential& a, int dir) {
  const int N = grid.N;
  const Cocycle chi(grid.lat, a.flux);
  const auto [sj, sk] = grid.hop_steps[dir];
  const Vec2 d = grid.hop_dirs[dir];
  LinkTable lt;
  lt.target.resize(grid.dim());
  lt.phase.resize(grid.dim());
  for (int j = 0; j < N; ++j) {
    for (int k = 0; k < N; ++k) {
      const int p = grid.idx(j, k);
      const Vec2 x = grid.point(j, k);
      double theta = a.eval(x + 0.5 * d).dot(d);
      int j0, k0, wj, wk;
      grid.wrap(j + sj, k + sk, j0, k0, wj, wk);
      cplx ph = std::exp(cplx(0.0, -theta));
      if (wj != 0 || wk != 0) {
        ph *= std::exp(cplx(0.0, chi.eval_coeff(wj, wk, grid.point(j0, k0))));
      }
      lt.target(p) = grid.idx(j0, k0);
      lt.phase(p) = ph;
    }
  }
  return lt;
}

}  // namespace

double OperatorRep::hermiticity_defect() const {
  const double scale = m.norm();
  if (scale == 0.0) return 0.0;
  return (m - m.adjoint()).cwiseAbs().maxCoeff() / scale;
}

SpectralData diagonalize(const Mat& a) {
  if (a.rows() != a.cols()) throw ShapeError("diagonalize: matrix is not square");
  if ((a - a.adjoint()).cwiseAbs().maxCoeff() > kHermTol * std::max(1.0, a.norm())) {
    throw ShapeError("diagonalize: matrix is not Hermitian");
  }
  Eigen::SelfAdjointEigenSolver<Mat> es(a);
  if (es.info() != Eigen::Success) throw NumericalError("eigensolver failed to converge");
  return SpectralData{es.eigenvalues(), es.eigenvectors()};
}

SpectralData diagonalize(const OperatorRep& a) { return diagonalize(a.m); }

Mat func_calc(const SpectralData& sd, const std::function<double(double)>& f) {
  const int n = static_cast<int>(sd.eigenvalues.size());
  RVec fe(n);
  for (int i = 0; i < n; ++i) {
    fe(i) = f(sd.eigenvalues(i));
    if (!std::isfinite(fe(i))) {
      throw EvaluationError("func_calc: f is not finite at eigenvalue " +
                            std::to_string(sd.eigenvalues(i)));
    }
  }
  return sd.eigenvectors * fe.asDiagonal() * sd.eigenvectors.adjoint();
}

OperatorRep func_calc(const OperatorRep& a, const std::function<double(double)>& f) {
  return OperatorRep{func_calc(diagonalize(a), f), a.basis};
}

RVec density(const Mat& a, const Grid& grid) {
  if (a.rows() != grid.dim()) throw ShapeError("density: operator does not match grid");
  return a.diagonal().real() / grid.cell_weight;
}

RVec density(const OperatorRep& a, const Grid& grid) { return density(a.m, grid); }

VectorPotential VectorPotential::uniform(const Lattice& lat, const FluxSector& f, int N) {
  VectorPotential a;
  a.flux = f;
  a.N = N;
  a.lat = lat;
  a.e_hat_x = Eigen::MatrixXcd::Zero(N, N);
  a.e_hat_y = Eigen::MatrixXcd::Zero(N, N);
  return a;
}

bool VectorPotential::has_periodic_part() const {
  return e_hat_x.size() > 0 && (e_hat_x.norm() > 0.0 || e_hat_y.norm() > 0.0);
}

Vec2 VectorPotential::eval_periodic(const Vec2& x) const {
  if (!has_periodic_part()) return Vec2::Zero();
  // G_{m1 m2} . x = 2 pi (m1 c1 + m2 c2) with (c1, c2) lattice coefficients of x
  const Vec2 c = lat.coefficients(x);
  cplx ex(0, 0), ey(0, 0);
  for (int m1 = 0; m1 < N; ++m1) {
    // map to symmetric frequencies
    const int f1 = (m1 <= N / 2) ? m1 : m1 - N;
    for (int m2 = 0; m2 < N; ++m2) {
      const int f2 = (m2 <= N / 2) ? m2 : m2 - N;
      if (e_hat_x(m1, m2) == cplx(0, 0) && e_hat_y(m1, m2) == cplx(0, 0)) continue;
      const double ph = 2.0 * std::numbers::pi * (f1 * c.x() + f2 * c.y());
      const cplx w = std::exp(cplx(0.0, ph));
      ex += e_hat_x(m1, m2) * w;
      ey += e_hat_y(m1, m2) * w;
    }
  }
  return Vec2(ex.real(), ey.real());
}

Vec2 VectorPotential::eval(const Vec2& x) const {
  return symmetric_gauge_potential(flux, x) + eval_periodic(x);
}

double VectorPotential::curl_energy() const {
  if (!has_periodic_part()) return 0.0;
  // curl e in Fourier: i (G_x e_y - G_y e_x); Parseval with cell area weight.
  const double area = lat.area;
  // reciprocal basis: G = 2 pi (m1 b1 + m2 b2), b_i dual to omega_i
  const double det = wedge(lat.omega1, lat.omega2);
  const Vec2 b1(lat.omega2.y() / det, -lat.omega2.x() / det);
  const Vec2 b2(-lat.omega1.y() / det, lat.omega1.x() / det);
  double sum = 0.0;
  for (int m1 = 0; m1 < N; ++m1) {
    const int f1 = (m1 <= N / 2) ? m1 : m1 - N;
    for (int m2 = 0; m2 < N; ++m2) {
      const int f2 = (m2 <= N / 2) ? m2 : m2 - N;
      const Vec2 G = 2.0 * std::numbers::pi * (f1 * b1 + f2 * b2);
      const cplx c = cplx(0, 1) * (G.x() * e_hat_y(m1, m2) - G.y() * e_hat_x(m1, m2));
      sum += std::norm(c);
    }
  }
  return area * sum;
}

double VectorPotential::periodic_l2() const {
  if (!has_periodic_part()) return 0.0;
  return lat.area * (e_hat_x.squaredNorm() + e_hat_y.squaredNorm());
}

Mat magnetic_laplacian(const Grid& grid, const VectorPotential& a) {
  const int dim = grid.dim();
  Mat h = Mat::Zero(dim, dim);
  for (std::size_t dir = 0; dir < grid.hop_dirs.size(); ++dir) {
    const double wgt = grid.hop_wts[dir];
    if (wgt == 0.0) continue;
    const LinkTable lt = build_links(grid, a, static_cast<int>(dir));
    for (int p = 0; p < dim; ++p) {
      const int q = lt.target(p);
      h(p, p) += 2.0 * wgt;
      h(p, q) -= wgt * lt.phase(p);
      h(q, p) -= wgt * std::conj(lt.phase(p));
    }
  }
  return h;
}

Mat magnetic_laplacian(const Grid& grid, const FluxSector& flux) {
  return magnetic_laplacian(grid, VectorPotential::uniform(grid.lat, flux, grid.N));
}

Mat magnetic_translation(const Grid& grid, const FluxSector& flux, int pj, int pk) {
  const int N = grid.N;
  const Cocycle chi(grid.lat, flux);
  const double ka = static_cast<double>(pj) / N;
  const double la = static_cast<double>(pk) / N;
  const Vec2 s = ka * grid.lat.omega1 + la * grid.lat.omega2;
  const double c_s = 0.5 * flux.b * ka * la * wedge(grid.lat.omega2, grid.lat.omega1);
  Mat u = Mat::Zero(grid.dim(), grid.dim());
  for (int j = 0; j < N; ++j) {
    for (int k = 0; k < N; ++k) {
      const Vec2 x = grid.point(j, k);
      int j0, k0, wj, wk;
      grid.wrap(j + pj, k + pk, j0, k0, wj, wk);
      cplx ph = std::exp(cplx(0.0, -(0.5 * flux.b * wedge(s, x) + c_s)));
      if (wj != 0 || wk != 0) {
        ph *= std::exp(cplx(0.0, chi.eval_coeff(wj, wk, grid.point(j0, k0))));
      }
      u(grid.idx(j, k), grid.idx(j0, k0)) = ph;
    }
  }
  return u;
}

Eigen::MatrixX2d current(const Mat& gamma, const Grid& grid, const VectorPotential& a) {
  if (gamma.rows() != grid.dim()) throw ShapeError("current: gamma does not match grid");
  const int dim = grid.dim();
  Eigen::MatrixX2d j = Eigen::MatrixX2d::Zero(dim, 2);
  for (std::size_t dir = 0; dir < grid.hop_dirs.size(); ++dir) {
    const double wgt = grid.hop_wts[dir];
    if (wgt == 0.0) continue;
    const LinkTable lt = build_links(grid, a, static_cast<int>(dir));
    const Vec2 d = grid.hop_dirs[dir];
    // bond current on link p -> target(p): 2 w Im[phase * gamma(target, p)]
    Eigen::VectorXd bond(dim);
    for (int p = 0; p < dim; ++p) {
      bond(p) = 2.0 * wgt * std::imag(lt.phase(p) * gamma(lt.target(p), p));
    }
    // site value: average of the two adjacent bonds along this direction
    for (int p = 0; p < dim; ++p) {
      j.row(lt.target(p)) += 0.25 * bond(p) * d.transpose();
      j.row(p) += 0.25 * bond(p) * d.transpose();
    }
  }
  return j / grid.cell_weight;
}

std::vector<int> cluster_labels(const RVec& eigenvalues, double b) {
  const int n = static_cast<int>(eigenvalues.size());
  std::vector<int> labels(n, 0);
  if (n == 0) return labels;
  double thresh = b > 0.0 ? 0.25 * b
                          : std::max(1e-9 * std::abs(eigenvalues(n - 1)), 1e-12);
  int cluster = 0;
  double mean = eigenvalues(0);
  int count = 1;
  for (int i = 1; i < n; ++i) {
    if (std::abs(eigenvalues(i) - mean) < thresh) {
      mean = (mean * count + eigenvalues(i)) / (count + 1);
      ++count;
    } else {
      ++cluster;
      mean = eigenvalues(i);
      count = 1;
    }
    labels[i] = cluster;
  }
  return labels;
}

}  // namespace bdg
