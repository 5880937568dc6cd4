#include "bdglab/normal.hpp"

#include <algorithm>
#include <cmath>

#include "bdglab/errors.hpp"

namespace bdg {

double g_T(double xi, const Thermo& th, double lambda_v, const RVec& lap_evals, double area) {
  if (lambda_v == 0.0) return 0.0;
  double tr = 0.0;
  for (int i = 0; i < lap_evals.size(); ++i) {
    tr += fermi_occupation(lap_evals(i) - th.mu + xi, th.T);
  }
  return lambda_v * tr / area;
}

namespace {

double g_T_prime(double xi, const Thermo& th, double lambda_v, const RVec& lap_evals,
                 double area) {
  if (lambda_v == 0.0) return 0.0;
  double s = 0.0;
  for (int i = 0; i < lap_evals.size(); ++i) {
    const double f = fermi_occupation(lap_evals(i) - th.mu + xi, th.T);
    s += -f * (1.0 - f) / th.T;
  }
  return lambda_v * s / area;
}

double bisect(const std::function<double(double)>& r, double lo, double hi, int iters) {
  double flo = r(lo);
  for (int i = 0; i < iters; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double fm = r(mid);
    if ((flo <= 0.0 && fm <= 0.0) || (flo > 0.0 && fm > 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

XiSolveResult solve_xi(const Thermo& th, double lambda_v, const RVec& lap_evals,
                       double area, double tol) {
  if (th.T <= 0.0) throw ConfigError("solve_xi requires T > 0");
  XiSolveResult out;
  const auto g = [&](double xi) { return g_T(xi, th, lambda_v, lap_evals, area); };
  const auto r = [&](double xi) { return xi - g(xi); };

  if (lambda_v == 0.0) {
    out.roots = {0.0};
  } else if (lambda_v > 0.0) {
    // g decreasing and positive: unique root in [0, g(0)]
    out.roots = {bisect(r, 0.0, g(0.0), 80)};
  } else {
    // scan [lambda * dim / area, 0] and report every sign change
    const double lo = lambda_v * static_cast<double>(lap_evals.size()) / area;
    const int scan = 256;
    double prev_x = lo, prev_r = r(lo);
    for (int i = 1; i <= scan; ++i) {
      const double x = lo + (0.0 - lo) * static_cast<double>(i) / scan;
      const double rx = r(x);
      if ((prev_r <= 0.0 && rx > 0.0) || (prev_r >= 0.0 && rx < 0.0)) {
        out.roots.push_back(bisect(r, prev_x, x, 80));
      }
      prev_x = x;
      prev_r = rx;
    }
    if (out.roots.empty() && std::abs(prev_r) < tol) out.roots.push_back(prev_x);
    if (out.roots.empty()) {
      throw NumericalError("solve_xi: no root bracketed on the scan interval");
    }
  }

  // physical branch: the root closest to zero mean field
  double best = out.roots.front();
  for (double x : out.roots) {
    if (std::abs(x) < std::abs(best)) best = x;
  }
  out.xi_bisect = best;

  // Newton polish; keep the bisection root if Newton wanders off
  double xi = best;
  for (int i = 0; i < 60; ++i) {
    const double res = r(xi);
    if (std::abs(res) < tol) break;
    const double dr = 1.0 - g_T_prime(xi, th, lambda_v, lap_evals, area);
    if (dr == 0.0) break;
    xi -= res / dr;
  }
  if (!std::isfinite(xi) || std::abs(r(xi)) > std::abs(r(best))) xi = best;
  out.xi = xi;
  out.residual = std::abs(r(xi));
  out.g_prime = g_T_prime(xi, th, lambda_v, lap_evals, area);
  if (out.residual > std::max(tol, 1e-10)) {
    throw NumericalError("solve_xi: fixed point residual " + std::to_string(out.residual));
  }
  return out;
}

NormalState normal_state(const Thermo& th, const FluxSector& flux, const PotentialOnGrid& v,
                         const Grid& grid, const SpectralData& lap_spec) {
  const XiSolveResult xs = solve_xi(th, v.integral, lap_spec.eigenvalues, grid.lat.area);
  NormalState ns;
  ns.xi = xs.xi;
  ns.thermo = th;
  ns.flux = flux;
  ns.h_evals = (lap_spec.eigenvalues.array() - th.mu + xs.xi).matrix();
  ns.h_evecs = lap_spec.eigenvectors;
  RVec occ(ns.h_evals.size());
  for (int i = 0; i < occ.size(); ++i) occ(i) = fermi_occupation(ns.h_evals(i), th.T);
  ns.gamma = lap_spec.eigenvectors * occ.asDiagonal() * lap_spec.eigenvectors.adjoint();
  ns.gamma = 0.5 * (ns.gamma + ns.gamma.adjoint()).eval();
  return ns;
}

NormalState normal_state(const Thermo& th, const FluxSector& flux, const PotentialOnGrid& v,
                         const Grid& grid) {
  const SpectralData sd = diagonalize(magnetic_laplacian(grid, flux));
  return normal_state(th, flux, v, grid, sd);
}

double self_consistency_residual(const NormalState& ns, const Grid& grid,
                                 const PotentialOnGrid& v) {
  Mat h = magnetic_laplacian(grid, ns.flux);
  h.diagonal() += direct_field(ns.gamma, grid, v).cast<cplx>();
  h -= ns.thermo.mu * Mat::Identity(grid.dim(), grid.dim());
  const Mat g2 = func_calc(diagonalize(h),
                           [&](double e) { return fermi_occupation(e, ns.thermo.T); });
  return (ns.gamma - g2).norm();
}

UniquenessReport verify_uniqueness_amp(const NormalState& ns, const Grid& grid) {
  UniquenessReport r;
  const RVec den = density(ns.gamma, grid);
  r.den_mean = den.mean();
  r.den_min = den.minCoeff();
  r.den_spread = (den.maxCoeff() - den.minCoeff()) / std::abs(r.den_mean);
  r.gamma_diag_min = ns.gamma.diagonal().real().minCoeff();
  return r;
}

}  // namespace bdg
