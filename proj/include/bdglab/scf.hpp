#pragma once

#include <string>
#include <vector>

#include "bdglab/normal.hpp"
#include "bdglab/stability.hpp"

namespace bdg {

struct SCFConfig {
  double damping = 0.3;        // theta in (0, 1]
  int max_iter = 800;
  double tol_gamma = 1e-8;     // fixed-point residual ||Gamma - f_T(Lambda)||
  double tol_ampere = 1e-8;    // ||curl*curl e - P j||
  int ampere_every = 5;        // Ampere update cadence (0 disables)
  enum class Seed { Normal, UnstableMode, Custom } seed = Seed::Normal;
  Mat custom_alpha;            // used when seed == Custom
  bool fixed_nu = false;       // re-solve mu each step so Tr gamma stays at nu
  double nu = -1.0;            // target particle number; < 0 means "of the seed"
  int seed_rank = 0;           // truncation rank for the unstable-mode seed (0: default 24)
  bool trace_states = false;   // keep per-iteration trace
};

struct SCFTraceRow {
  int iter = 0;
  double residual = 0.0;
  double ampere_residual = 0.0;
  double free_energy = 0.0;
  double alpha_hs = 0.0;
  double mu = 0.0;
};

struct SCFResult {
  enum class Verdict { Converged, Stalled, Diverged };
  Verdict verdict = Verdict::Stalled;
  BdGState state;
  VectorPotential a;
  double mu = 0.0;             // final chemical potential (shifted when fixed_nu)
  double nu = 0.0;
  double residual = 0.0;
  double ampere_residual = 0.0;
  int iterations = 0;
  double free_energy = 0.0;
  double seed_amplitude = 0.0;
  double lambda_min_seed = 0.0;  // lowest Hessian eigenvalue at the seed normal state
  std::vector<SCFTraceRow> trace;
};

SCFResult scf_solve(const Thermo& th, const FluxSector& flux, const PotentialOnGrid& v,
                    const Grid& grid, const SCFConfig& cfg);

double order_parameter(const BdGState& s);

// Transverse mean-zero projection and the Fourier Ampere solve
// curl*curl e = P j on cell-periodic fields.
struct AmpereSolve {
  VectorPotential e;      // updated potential (a_b part unchanged)
  double source_norm = 0.0;
  double div_defect = 0.0;   // ||div P j|| after projection
  double mean_defect = 0.0;  // |mean P j|
};

AmpereSolve solve_ampere(const Eigen::MatrixX2d& j, const Grid& grid,
                         const VectorPotential& a_prev);

double ampere_residual(const Eigen::MatrixX2d& j, const Grid& grid, const VectorPotential& a);

struct EquivarianceReport {
  double gamma_residual = 0.0;   // max_s ||U_s Gamma U_s^-1 - Gamma|| over basis shifts
  double e_translation = 0.0;    // ||translate(e) - e||
  double flux_integer = 0.0;     // (1/2pi) int curl a
  double reflection_residual = 0.0;  // ||R gamma R - gamma||
};

EquivarianceReport equivariance_check(const SCFResult& r, const Grid& grid);

struct EnergyComparison {
  double f_vortex = 0.0;
  double f_normal = 0.0;
  double delta = 0.0;
  double alpha_hs = 0.0;
};

EnergyComparison energy_comparison(const SCFResult& r, const Thermo& th, const Grid& grid,
                                   const PotentialOnGrid& v);

}  // namespace bdg
