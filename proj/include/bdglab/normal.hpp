#pragma once

#include <vector>

#include "bdglab/state.hpp"

namespace bdg {

// mt-invariant normal state: gamma = f_T(-Delta_{a_b} - mu + xi) with xi the
// scalar mean field solving xi = g_T(xi).
struct NormalState {
  double xi = 0.0;
  Mat gamma;
  Thermo thermo;
  FluxSector flux;
  // spectrum of h_Tb = -Delta_{a_b} - mu + xi (shared eigenvectors with -Delta)
  RVec h_evals;
  Mat h_evecs;

  BdGState state() const { return BdGState::normal(gamma); }
};

struct XiSolveResult {
  double xi = 0.0;
  double residual = 0.0;        // |xi - g_T(xi)|
  double xi_bisect = 0.0;       // root from plain bisection (cross-check)
  std::vector<double> roots;    // all bracketed roots (lambda < 0 scan)
  double g_prime = 0.0;         // g_T'(xi) at the solution
};

// g_T(xi) = (int v) Tr f_T(-Delta_{a_b} - mu + xi) / |cell|, evaluated from a
// cached spectrum of -Delta_{a_b}.
double g_T(double xi, const Thermo& th, double lambda_v, const RVec& lap_evals, double area);

XiSolveResult solve_xi(const Thermo& th, double lambda_v, const RVec& lap_evals,
                       double area, double tol = 1e-12);

NormalState normal_state(const Thermo& th, const FluxSector& flux, const PotentialOnGrid& v,
                         const Grid& grid);
NormalState normal_state(const Thermo& th, const FluxSector& flux, const PotentialOnGrid& v,
                         const Grid& grid, const SpectralData& lap_spec);

// Self-consistency residual ||gamma - f_T(-Delta - mu + v * rho_gamma)||.
double self_consistency_residual(const NormalState& ns, const Grid& grid,
                                 const PotentialOnGrid& v);

struct UniquenessReport {
  double den_mean = 0.0;
  double den_min = 0.0;
  double den_spread = 0.0;   // (max - min) / mean
  double gamma_diag_min = 0.0;  // min of gamma(x, x); > 0 is the Ampere coercivity constant
};

UniquenessReport verify_uniqueness_amp(const NormalState& ns, const Grid& grid);

}  // namespace bdg
