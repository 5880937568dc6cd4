#include "bdglab/state.hpp"

#include <cmath>

#include "bdglab/errors.hpp"

namespace bdg {

double fermi_occupation(double e, double T) {
  if (T <= 0.0) {
    if (e < 0.0) return 1.0;
    if (e > 0.0) return 0.0;
    return 0.5;
  }
  return 0.5 * (1.0 - std::tanh(0.5 * e / T));
}

BdGState BdGState::normal(Mat g) {
  BdGState s;
  s.alpha = Mat::Zero(g.rows(), g.cols());
  s.gamma = std::move(g);
  return s;
}

AdmissibilityReport check_admissible(const BdGState& s) {
  AdmissibilityReport r;
  Eigen::SelfAdjointEigenSolver<Mat> es(s.gamma);
  r.gamma_min = es.eigenvalues().minCoeff();
  r.gamma_max = es.eigenvalues().maxCoeff();
  r.alpha_symmetry = (s.alpha - s.alpha.transpose()).cwiseAbs().maxCoeff();
  const Mat gap = s.alpha * s.alpha.adjoint() -
                  s.gamma * (Mat::Identity(s.dim(), s.dim()) - s.gamma);
  Eigen::SelfAdjointEigenSolver<Mat> eg(gap);
  r.pairing_bound = eg.eigenvalues().maxCoeff();
  return r;
}

bool AdmissibilityReport::admissible(double tol_gamma, double tol_sym, double tol_pair) const {
  return gamma_min >= -tol_gamma && gamma_max <= 1.0 + tol_gamma &&
         alpha_symmetry <= tol_sym && pairing_bound <= tol_pair;
}

Mat assemble_big_gamma(const BdGState& s) {
  const int d = s.dim();
  if (s.alpha.rows() != d || s.alpha.cols() != d) {
    throw ShapeError("assemble_big_gamma: gamma/alpha dimension mismatch");
  }
  Mat big(2 * d, 2 * d);
  big.topLeftCorner(d, d) = s.gamma;
  big.topRightCorner(d, d) = s.alpha;
  big.bottomLeftCorner(d, d) = s.alpha.adjoint();
  big.bottomRightCorner(d, d) = Mat::Identity(d, d) - s.gamma.conjugate();
  return big;
}

RVec direct_field(const Mat& gamma, const Grid& grid, const PotentialOnGrid& v) {
  // (v * rho)(x) = cell_weight * sum_y v(x - y) rho(y), rho = diag(gamma)/w
  return v.v * gamma.diagonal().real();
}

Mat effective_hamiltonian(const BdGState& s, const VectorPotential& a, const Grid& grid,
                          const PotentialOnGrid& v, const Thermo& th, bool exchange) {
  const int d = s.dim();
  if (d != grid.dim()) throw GridMismatchError("effective_hamiltonian: state does not match grid");
  if (v.v.rows() != d) throw GridMismatchError("effective_hamiltonian: potential does not match grid");

  Mat h = magnetic_laplacian(grid, a);
  h.diagonal() += direct_field(s.gamma, grid, v).cast<cplx>();
  if (exchange) h -= v.v.cast<cplx>().cwiseProduct(s.gamma);
  h -= th.mu * Mat::Identity(d, d);

  Mat delta = v.v.cast<cplx>().cwiseProduct(s.alpha);
  Mat lam(2 * d, 2 * d);
  lam.topLeftCorner(d, d) = h;
  lam.topRightCorner(d, d) = delta;
  lam.bottomLeftCorner(d, d) = delta.adjoint();
  lam.bottomRightCorner(d, d) = -h.conjugate();
  return lam;
}

BdGState gibbs_map(const BdGState& s, const VectorPotential& a, const Grid& grid,
                   const PotentialOnGrid& v, const Thermo& th, bool exchange) {
  const Mat lam = effective_hamiltonian(s, a, grid, v, th, exchange);
  const SpectralData sd = diagonalize(lam);
  const Mat big = func_calc(sd, [&](double e) { return fermi_occupation(e, th.T); });
  const int d = s.dim();
  BdGState out;
  out.gamma = big.topLeftCorner(d, d);
  out.alpha = big.topRightCorner(d, d);
  // kill roundoff asymmetry; the exact image is symmetric
  out.gamma = 0.5 * (out.gamma + out.gamma.adjoint()).eval();
  out.alpha = 0.5 * (out.alpha + out.alpha.transpose()).eval();
  return out;
}

double energy(const BdGState& s, const VectorPotential& a, const Grid& grid,
              const PotentialOnGrid& v, bool exchange) {
  const Mat h0 = magnetic_laplacian(grid, a);
  const double e_kin = (h0 * s.gamma).trace().real();
  const RVec rho_diag = s.gamma.diagonal().real();  // = w * rho
  const double e_dir = 0.5 * rho_diag.dot(v.v * rho_diag);
  double e_exch = 0.0;
  if (exchange) {
    e_exch = -0.5 * (v.v.cast<cplx>().cwiseProduct(s.gamma) * s.gamma).trace().real();
  }
  const double e_pair = (v.v.array() * s.alpha.array().abs2()).sum();
  const double e_field = a.curl_energy() + a.flux.b * a.flux.b * grid.lat.area;
  return e_kin + e_dir + e_exch + e_pair + e_field;
}

double entropy(const BdGState& s) {
  const Mat big = assemble_big_gamma(s);
  Eigen::SelfAdjointEigenSolver<Mat> es(big);
  double sum = 0.0;
  for (int i = 0; i < es.eigenvalues().size(); ++i) {
    double lam = es.eigenvalues()(i);
    if (lam < -1e-10 || lam > 1.0 + 1e-10) {
      throw AdmissibilityError("entropy: eigenvalue of Gamma outside [0, 1]: " +
                               std::to_string(lam));
    }
    lam = std::min(1.0, std::max(0.0, lam));
    if (lam > 0.0 && lam < 1.0) {
      sum += -lam * std::log(lam) - (1.0 - lam) * std::log(1.0 - lam);
    }
  }
  return sum;
}

double free_energy(const BdGState& s, const VectorPotential& a, const Grid& grid,
                   const PotentialOnGrid& v, const Thermo& th, bool exchange) {
  return energy(s, a, grid, v, exchange) - th.T * entropy(s) -
         th.mu * s.gamma.trace().real();
}

double hs_norm(const Mat& a) { return a.norm(); }

}  // namespace bdg
