#pragma once

#include <optional>
#include <string>
#include <vector>

#include "bdglab/normal.hpp"

namespace bdg {

// f(s, t) = (s + t) / (tanh s + tanh t), continuously extended across the
// removable singularities; f >= 1 with the minimum 1 at s = t = 0.
double scalar_f(double s, double t);

// First M eigenpairs of h_Tb = -Delta_{a_b} - mu + xi, grid columns normalized
// to cell_weight * phi^H phi = 1.
struct HSBasis {
  int M = 0;
  Mat phis;   // N^2 x M
  RVec es;    // ascending
};

// Pairing Hessian L_Tb = K_Tb + v# restricted to symmetric kernels
// alpha(x, y) = alpha(y, x), expressed in the product basis phi_i (x) phi_j (y).
struct StabilityOperator {
  HSBasis basis;
  double T = 0.0;
  Eigen::MatrixXd Kdiag;                  // M x M kernel entries K_ij
  Mat Vsym;                               // symmetric-subspace block of v#
  std::vector<std::pair<int, int>> pairs; // (i <= j) indexing the subspace
  double cell_weight = 0.0;
  bool coverage_warning = false;          // e_M - e_1 < 6 max(T, ||v||_inf)

  int sym_dim() const { return static_cast<int>(pairs.size()); }
  Mat L() const;                          // K + Vsym on the symmetric subspace
  RVec k_sym() const;                     // K on the subspace diagonal
};

// Caches everything T-independent (basis, v# and w# blocks) so temperature
// sweeps only reassemble the diagonal kernel.
class StabilityAssembler {
 public:
  StabilityAssembler(const Grid& grid, const FluxSector& flux, const PotentialOnGrid& v,
                     const SpectralData& lap_spec, int M);

  StabilityOperator at(const NormalState& ns) const;
  const Mat& wsym() const;  // symmetric-subspace block of w# = sqrt(-v)#

  int M() const { return M_; }

 private:
  Mat build_sym_block(const Eigen::MatrixXd& kernel_matrix) const;

  const Grid& grid_;
  FluxSector flux_;
  const PotentialOnGrid& v_;
  int M_;
  mutable HSBasis basis_;  // es adjusted per query (shared eigenvectors)
  Mat vsym_;
  mutable std::optional<Mat> wsym_;
  std::vector<std::pair<int, int>> pairs_;
};

StabilityOperator build_L(const NormalState& ns, const Grid& grid, const PotentialOnGrid& v,
                          int M);

struct LowestMode {
  double lambda_min = 0.0;
  Mat kernel_coeffs;  // M x M symmetric coefficient matrix c
  Mat alpha_grid;     // cell_weight * Phi c Phi^T
};

LowestMode lowest_eigenvalue(const StabilityOperator& L);

struct BirmanSchwingerReport {
  double e_star = 0.0;           // -lambda_min(L)
  double g_at_estar = 0.0;       // largest eigenvalue of G(E*); 1 at consistency
  std::vector<std::pair<double, double>> scan;  // (E, lambda_max G(E))
  bool monotone = false;
  double g_large_e = 0.0;        // lambda_max G(1000 ||v||)
  // every negative eigenvalue -E of L must give lambda_max G(E) = 1
  std::vector<double> negative_eigenvalue_defects;
};

BirmanSchwingerReport birman_schwinger_check(const NormalState& ns, const Grid& grid,
                                             const PotentialOnGrid& v, int M,
                                             int scan_points = 10);

struct TcResult {
  enum class Verdict { Found, StableEverywhere, UnstableEverywhere };
  Verdict verdict = Verdict::StableEverywhere;
  double tc = 0.0;
  double lambda_lo = 0.0;   // lambda_min at the lower bracket end
  double lambda_hi = 0.0;
  double m_doubled_drift = 0.0;  // relative lambda_min change under M -> 2M
  std::vector<std::pair<double, double>> trace;  // (T, lambda_min)
};

TcResult critical_temperature(const FluxSector& flux, const PotentialOnGrid& v, double mu,
                              const Grid& grid, int M, double t_lo = 1e-3,
                              double t_hi = -1.0, double tol = 1e-4,
                              bool drift_check = false);

struct HessianFdReport {
  double quad_form = 0.0;            // <alpha, L alpha>
  std::vector<double> eps;
  std::vector<double> fd_coeff;      // D(eps)
  std::vector<double> abs_err;
  double shrink_ratio = 0.0;         // err(eps/2) / err(eps), noise permitting
  double scale = 0.0;                // admissibility scaling applied to alpha
};

HessianFdReport hessian_fd_check(const NormalState& ns, const Grid& grid,
                                 const PotentialOnGrid& v, const Mat& alpha_grid,
                                 const Mat& kernel_coeffs, const StabilityOperator& L,
                                 const std::vector<double>& eps = {1e-2, 5e-3, 2.5e-3});

// Scale alpha so that (eps_max * alpha) alpha^* stays below [gamma(1-gamma)]^2.
double admissible_scale(const Mat& alpha_grid, const Mat& gamma, double eps_max);

struct PhaseCell {
  double b = 0.0;
  double T = 0.0;
  double xi = 0.0;
  double lambda_min = 0.0;
  std::string verdict;  // "stable" | "unstable" | "error:..."
};

std::vector<PhaseCell> phase_diagram(const std::vector<double>& bs, const std::vector<double>& Ts,
                                     const PairPotential& pot, double mu, const Lattice& unit_lat,
                                     int N, int M, int threads = 1);

}  // namespace bdg
