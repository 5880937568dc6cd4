#include "bdglab/stability.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <thread>

#include "bdglab/errors.hpp"

namespace bdg {

double scalar_f(double s, double t) {
  const double den = std::tanh(s) + std::tanh(t);
  const double num = s + t;
  if (std::abs(den) >= 1e-8) return num / den;
  // Near the line s + t = 0 the direct quotient cancels. With u = s + t,
  // tanh(s) + tanh(t) = tanh(u) sech^2(s) / (1 - tanh(s) tanh(u)) exactly, so
  // f = cosh^2(s) (u / tanh u)(1 - tanh(s) tanh(u)); u/tanh(u) -> 1 at u = 0.
  const double u = num;
  const double c = std::cosh(s);
  const double ratio = (u == 0.0) ? 1.0 : u / std::tanh(u);
  return c * c * ratio * (1.0 - std::tanh(s) * std::tanh(u));
}

namespace {

Eigen::MatrixXd kernel_K(const RVec& es, double T, double v_sup) {
  const int M = static_cast<int>(es.size());
  // Pairs far below/above the Fermi level can produce astronomically stiff
  // kernel entries (f ~ cosh^2); capping keeps the eigensolve conditioned and
  // perturbs the low end by at most ||v||^2 / cap.
  const double cap = 1e8 * std::max(1.0, v_sup);
  Eigen::MatrixXd K(M, M);
  for (int i = 0; i < M; ++i) {
    for (int j = i; j < M; ++j) {
      double val = 4.0 * T * scalar_f(0.5 * es(i) / T, 0.5 * es(j) / T);
      if (!(val < cap)) val = cap;
      K(i, j) = val;
      K(j, i) = val;
    }
  }
  return K;
}

}  // namespace

Mat StabilityOperator::L() const {
  Mat out = Vsym;
  for (int p = 0; p < sym_dim(); ++p) {
    out(p, p) += Kdiag(pairs[p].first, pairs[p].second);
  }
  return out;
}

RVec StabilityOperator::k_sym() const {
  RVec out(sym_dim());
  for (int p = 0; p < sym_dim(); ++p) out(p) = Kdiag(pairs[p].first, pairs[p].second);
  return out;
}

StabilityAssembler::StabilityAssembler(const Grid& grid, const FluxSector& flux,
                                       const PotentialOnGrid& v, const SpectralData& lap_spec,
                                       int M)
    : grid_(grid), flux_(flux), v_(v), M_(M) {
  if (M < 1 || M > grid.dim()) throw ConfigError("truncation rank M outside [1, N^2]");
  basis_.M = M;
  basis_.phis = lap_spec.eigenvectors.leftCols(M) / std::sqrt(grid.cell_weight);
  basis_.es = lap_spec.eigenvalues.head(M);
  pairs_.reserve(M * (M + 1) / 2);
  for (int i = 0; i < M; ++i) {
    for (int j = i; j < M; ++j) pairs_.emplace_back(i, j);
  }
  vsym_ = build_sym_block(v_.v);
}

Mat StabilityAssembler::build_sym_block(const Eigen::MatrixXd& kernel_matrix) const {
  // <B_p, kernel# B_q> from Q[(ik),(jl)] = w^2 rho_ik^T kernel rho_jl with
  // rho_ik(x) = conj(phi_i(x)) phi_k(x). Assembled in i-blocks: Q is plain
  // transpose symmetric, so all four orderings reduce to two entries of Q_i.
  const int M = M_;
  const int dim = grid_.dim();
  const double w2 = grid_.cell_weight * grid_.cell_weight;
  const int sym = static_cast<int>(pairs_.size());

  Mat P(dim, M * M);
  for (int i = 0; i < M; ++i) {
    for (int k = 0; k < M; ++k) {
      P.col(i * M + k) = basis_.phis.col(i).conjugate().cwiseProduct(basis_.phis.col(k));
    }
  }
  Mat W = kernel_matrix.cast<cplx>() * P;  // dim x M^2

  Mat out(sym, sym);
  std::vector<int> row_of_pair(M * M, -1);
  for (int p = 0; p < sym; ++p) {
    row_of_pair[pairs_[p].first * M + pairs_[p].second] = p;
  }
  for (int i = 0; i < M; ++i) {
    // Q_i[k, (jl)] = w^2 rho_ik^T W_(jl)
    Mat Qi = w2 * (P.middleCols(i * M, M).transpose() * W);  // M x M^2
    for (int j = i; j < M; ++j) {
      const int p = row_of_pair[i * M + j];
      const double np = (i == j) ? 0.5 : 1.0 / std::sqrt(2.0);
      for (int q = 0; q < sym; ++q) {
        const auto [k, l] = pairs_[q];
        const double nq = (k == l) ? 0.5 : 1.0 / std::sqrt(2.0);
        const cplx val = Qi(k, j * M + l) + Qi(l, j * M + k);
        out(p, q) = 2.0 * np * nq * val;
      }
    }
  }
  out = 0.5 * (out + out.adjoint()).eval();
  return out;
}

StabilityOperator StabilityAssembler::at(const NormalState& ns) const {
  StabilityOperator L;
  L.basis = basis_;
  L.basis.es = (basis_.es.array() - ns.thermo.mu + ns.xi).matrix();
  L.T = ns.thermo.T;
  L.Kdiag = kernel_K(L.basis.es, ns.thermo.T, v_.sup_norm);
  L.Vsym = vsym_;
  L.pairs = pairs_;
  L.cell_weight = grid_.cell_weight;
  const double span = L.basis.es(M_ - 1) - L.basis.es(0);
  L.coverage_warning = span < 6.0 * std::max(ns.thermo.T, v_.sup_norm);
  return L;
}

const Mat& StabilityAssembler::wsym() const {
  if (!wsym_) {
    if (!v_.attractive) throw HypothesisError("Birman-Schwinger requires v <= 0 pointwise");
    wsym_ = build_sym_block(v_.v.cwiseAbs().cwiseSqrt());
  }
  return *wsym_;
}

StabilityOperator build_L(const NormalState& ns, const Grid& grid, const PotentialOnGrid& v,
                          int M) {
  SpectralData sd{RVec((ns.h_evals.array() + ns.thermo.mu - ns.xi).matrix()), ns.h_evecs};
  StabilityAssembler asm_(grid, ns.flux, v, sd, M);
  return asm_.at(ns);
}

LowestMode lowest_eigenvalue(const StabilityOperator& L) {
  Eigen::SelfAdjointEigenSolver<Mat> es(L.L());
  if (es.info() != Eigen::Success) throw NumericalError("stability eigensolver failed");
  LowestMode out;
  out.lambda_min = es.eigenvalues()(0);
  const int M = L.basis.M;
  out.kernel_coeffs = Mat::Zero(M, M);
  for (int p = 0; p < L.sym_dim(); ++p) {
    const auto [i, j] = L.pairs[p];
    const cplx c = es.eigenvectors()(p, 0);
    if (i == j) {
      out.kernel_coeffs(i, i) = c;
    } else {
      out.kernel_coeffs(i, j) = c / std::sqrt(2.0);
      out.kernel_coeffs(j, i) = c / std::sqrt(2.0);
    }
  }
  out.alpha_grid = L.cell_weight *
                   (L.basis.phis * out.kernel_coeffs * L.basis.phis.transpose());
  return out;
}

BirmanSchwingerReport birman_schwinger_check(const NormalState& ns, const Grid& grid,
                                             const PotentialOnGrid& v, int M,
                                             int scan_points) {
  if (!v.attractive) throw HypothesisError("Birman-Schwinger requires v <= 0 pointwise");
  SpectralData sd{RVec((ns.h_evals.array() + ns.thermo.mu - ns.xi).matrix()), ns.h_evecs};
  StabilityAssembler asm_(grid, ns.flux, v, sd, M);
  const StabilityOperator L = asm_.at(ns);
  const Mat& wsym = asm_.wsym();
  const RVec ksym = L.k_sym();

  const auto g_max = [&](double E) {
    Mat G = wsym * (ksym.array() + E).inverse().matrix().asDiagonal() * wsym;
    Eigen::SelfAdjointEigenSolver<Mat> es(G);
    return es.eigenvalues().maxCoeff();
  };

  Eigen::SelfAdjointEigenSolver<Mat> es(L.L());
  BirmanSchwingerReport rep;
  rep.e_star = -es.eigenvalues()(0);
  if (rep.e_star > 0.0) {
    rep.g_at_estar = g_max(rep.e_star);
    for (int i = 0; i < es.eigenvalues().size() && es.eigenvalues()(i) < 0.0; ++i) {
      rep.negative_eigenvalue_defects.push_back(std::abs(g_max(-es.eigenvalues()(i)) - 1.0));
    }
  }
  const double e_lo = std::max(rep.e_star, 1e-3 * std::max(v.sup_norm, 1.0));
  for (int i = 0; i < scan_points; ++i) {
    const double E = e_lo * std::pow(1.6, i);
    rep.scan.emplace_back(E, g_max(E));
  }
  rep.monotone = true;
  for (std::size_t i = 1; i < rep.scan.size(); ++i) {
    if (rep.scan[i].second >= rep.scan[i - 1].second) rep.monotone = false;
  }
  rep.g_large_e = g_max(1000.0 * std::max(v.sup_norm, 1.0));
  return rep;
}

TcResult critical_temperature(const FluxSector& flux, const PotentialOnGrid& v, double mu,
                              const Grid& grid, int M, double t_lo, double t_hi, double tol,
                              bool drift_check) {
  if (t_hi <= 0.0) t_hi = 2.0 * v.sup_norm + 1.0;
  const SpectralData lap = diagonalize(magnetic_laplacian(grid, flux));
  StabilityAssembler asm_(grid, flux, v, lap, M);

  const auto lambda_min_at = [&](double T, const StabilityAssembler& a) {
    const NormalState ns = normal_state(Thermo{T, mu}, flux, v, grid, lap);
    const StabilityOperator L = a.at(ns);
    Eigen::SelfAdjointEigenSolver<Mat> es(L.L());
    return es.eigenvalues()(0);
  };

  TcResult out;
  double f_lo = lambda_min_at(t_lo, asm_);
  double f_hi = lambda_min_at(t_hi, asm_);
  out.trace.emplace_back(t_lo, f_lo);
  out.trace.emplace_back(t_hi, f_hi);
  out.lambda_lo = f_lo;
  out.lambda_hi = f_hi;
  if (f_lo >= 0.0 && f_hi >= 0.0) {
    out.verdict = TcResult::Verdict::StableEverywhere;
  } else if (f_lo < 0.0 && f_hi < 0.0) {
    out.verdict = TcResult::Verdict::UnstableEverywhere;
  } else {
    double lo = t_lo, hi = t_hi;
    while (hi - lo > tol) {
      const double mid = 0.5 * (lo + hi);
      const double fm = lambda_min_at(mid, asm_);
      out.trace.emplace_back(mid, fm);
      if ((fm < 0.0) == (f_lo < 0.0)) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    out.verdict = TcResult::Verdict::Found;
    out.tc = 0.5 * (lo + hi);
  }
  if (drift_check) {
    const int M2 = std::min(2 * M, grid.dim());
    StabilityAssembler asm2(grid, flux, v, lap, M2);
    const double t_probe = (out.verdict == TcResult::Verdict::Found)
                               ? std::max(out.tc - 10.0 * tol, t_lo)
                               : t_lo;
    const double l1 = lambda_min_at(t_probe, asm_);
    const double l2 = lambda_min_at(t_probe, asm2);
    out.m_doubled_drift = std::abs(l2 - l1) / std::max(std::abs(l1), t_probe);
  }
  return out;
}

double admissible_scale(const Mat& alpha_grid, const Mat& gamma, double eps_max) {
  const int d = static_cast<int>(gamma.rows());
  const Mat b = gamma * (Mat::Identity(d, d) - gamma);
  const Mat target = b * b;
  double s = 1.0;
  for (int k = 0; k < 60; ++k) {
    const Mat probe = (eps_max * s) * alpha_grid;
    const Mat gap = target - probe * probe.adjoint();
    Eigen::SelfAdjointEigenSolver<Mat> es(gap);
    if (es.eigenvalues().minCoeff() >= -1e-14) return s;
    s *= 0.5;
  }
  throw AdmissibilityError("admissible_scale: could not satisfy the pairing cone condition");
}

HessianFdReport hessian_fd_check(const NormalState& ns, const Grid& grid,
                                 const PotentialOnGrid& v, const Mat& alpha_grid,
                                 const Mat& kernel_coeffs, const StabilityOperator& L,
                                 const std::vector<double>& eps) {
  HessianFdReport rep;
  rep.eps = eps;
  const double eps_max = *std::max_element(eps.begin(), eps.end());
  rep.scale = admissible_scale(alpha_grid, ns.gamma, eps_max);
  const Mat alpha = rep.scale * alpha_grid;
  const Mat coeffs = rep.scale * kernel_coeffs;

  // <alpha, L alpha> = sum K_ij |c_ij|^2 + sum v(x-y) |alpha(x,y)|^2; the
  // v-part is evaluated on the grid so the probe carries no truncation error.
  double quad = (v.v.array() * alpha.array().abs2()).sum();
  for (int i = 0; i < L.basis.M; ++i) {
    for (int j = 0; j < L.basis.M; ++j) {
      quad += L.Kdiag(i, j) * std::norm(coeffs(i, j));
    }
  }
  rep.quad_form = quad;

  const VectorPotential a = VectorPotential::uniform(grid.lat, ns.flux, grid.N);
  BdGState s0 = ns.state();
  const double f0 = free_energy(s0, a, grid, v, ns.thermo);
  for (double e : eps) {
    BdGState se = s0;
    se.alpha = e * alpha;
    const double fe = free_energy(se, a, grid, v, ns.thermo);
    const double d = (fe - f0) / (e * e);
    rep.fd_coeff.push_back(d);
    rep.abs_err.push_back(std::abs(d - quad));
  }
  if (rep.abs_err.size() >= 2 && rep.abs_err.front() > 0.0) {
    rep.shrink_ratio = rep.abs_err.back() / rep.abs_err.front();
  }
  return rep;
}

std::vector<PhaseCell> phase_diagram(const std::vector<double>& bs, const std::vector<double>& Ts,
                                     const PairPotential& pot, double mu, const Lattice& unit_lat,
                                     int N, int M, int threads) {
  struct Job {
    std::size_t ib, it;
  };
  std::vector<Job> jobs;
  for (std::size_t ib = 0; ib < bs.size(); ++ib) {
    for (std::size_t it = 0; it < Ts.size(); ++it) jobs.push_back({ib, it});
  }
  std::vector<PhaseCell> cells(jobs.size());

  const auto work = [&](std::size_t lo, std::size_t hi) {
    for (std::size_t idx = lo; idx < hi; ++idx) {
      const auto [ib, it] = jobs[idx];
      PhaseCell& cell = cells[idx];
      cell.b = bs[ib];
      cell.T = Ts[it];
      try {
        const double scale = std::sqrt(2.0 * std::numbers::pi / (cell.b * unit_lat.area));
        const Lattice lat(scale * unit_lat.omega1, scale * unit_lat.omega2);
        const FluxSector flux = make_flux_sector(lat, 1);
        const Grid grid(lat, N);
        const PotentialOnGrid v = sample_potential(pot, grid);
        const NormalState ns = normal_state(Thermo{cell.T, mu}, flux, v, grid);
        cell.xi = ns.xi;
        const StabilityOperator L = build_L(ns, grid, v, std::min(M, grid.dim()));
        cell.lambda_min = lowest_eigenvalue(L).lambda_min;
        cell.verdict = cell.lambda_min < 0.0 ? "unstable" : "stable";
      } catch (const std::exception& e) {
        cell.verdict = std::string("error:") + e.what();
      }
    }
  };

  threads = std::max(1, threads);
  if (threads == 1 || jobs.size() < 2) {
    work(0, jobs.size());
  } else {
    std::vector<std::thread> pool;
    const std::size_t chunk = (jobs.size() + threads - 1) / threads;
    for (int t = 0; t < threads; ++t) {
      const std::size_t lo = t * chunk;
      const std::size_t hi = std::min(jobs.size(), lo + chunk);
      if (lo < hi) pool.emplace_back(work, lo, hi);
    }
    for (auto& th : pool) th.join();
  }
  return cells;
}

}  // namespace bdg
