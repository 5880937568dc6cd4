#pragma once

#include <optional>

#include "bdglab/operators.hpp"

namespace bdg {

struct Thermo {
  double T = 0.0;   // temperature >= 0
  double mu = 0.0;  // chemical potential
};

// Fermi-Dirac occupation f_T(e) = (1 + exp(e/T))^{-1}, spectral projection in
// the T = 0 limit (1 below, 1/2 at, 0 above zero).
double fermi_occupation(double e, double T);

// BdG state (gamma, alpha): one-particle density operator and pairing kernel.
struct BdGState {
  Mat gamma;  // Hermitian, 0 <= gamma <= 1
  Mat alpha;  // symmetric kernel, alpha = alpha^T

  static BdGState normal(Mat g);
  int dim() const { return static_cast<int>(gamma.rows()); }
};

struct AdmissibilityReport {
  double gamma_min = 0.0;         // lowest eigenvalue of gamma
  double gamma_max = 0.0;         // highest eigenvalue of gamma
  double alpha_symmetry = 0.0;    // max |alpha - alpha^T|
  double pairing_bound = 0.0;     // lambda_max(alpha alpha^* - gamma(1 - gamma))
  bool admissible(double tol_gamma = 1e-10, double tol_sym = 1e-10,
                  double tol_pair = 1e-9) const;
};

AdmissibilityReport check_admissible(const BdGState& s);

// Gamma = [[gamma, alpha], [alpha^*, 1 - conj(gamma)]].
Mat assemble_big_gamma(const BdGState& s);

// Lambda_{Gamma a} = [[h - mu, v# alpha], [(v# alpha)^*, -conj(h - mu)]] with
// h = -Delta_a + v * rho_gamma (exchange kernel term optional, off by default).
Mat effective_hamiltonian(const BdGState& s, const VectorPotential& a, const Grid& grid,
                          const PotentialOnGrid& v, const Thermo& th, bool exchange = false);

// One application of the Gibbs map Gamma -> f_T(Lambda_{Gamma a}).
BdGState gibbs_map(const BdGState& s, const VectorPotential& a, const Grid& grid,
                   const PotentialOnGrid& v, const Thermo& th, bool exchange = false);

// Energy, entropy and free energy of a state. The field term uses the exact
// decomposition int |curl a|^2 = int |curl e|^2 + b^2 |cell|.
double energy(const BdGState& s, const VectorPotential& a, const Grid& grid,
              const PotentialOnGrid& v, bool exchange = false);
double entropy(const BdGState& s);
double free_energy(const BdGState& s, const VectorPotential& a, const Grid& grid,
                   const PotentialOnGrid& v, const Thermo& th, bool exchange = false);

// Direct (Hartree) field (v * rho_gamma)(x) on the grid.
RVec direct_field(const Mat& gamma, const Grid& grid, const PotentialOnGrid& v);

// Hilbert-Schmidt inner product Tr(a^* b) of kernels in the grid basis.
double hs_norm(const Mat& a);

}  // namespace bdg
