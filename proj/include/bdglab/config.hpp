#pragma once

#include <optional>
#include <string>
#include <vector>

#include "bdglab/scf.hpp"

namespace bdg {

// Full run configuration, loadable from a JSON file with CLI overrides.
struct RunConfig {
  // geometry
  std::string lattice_kind = "square";  // square | triangular | custom
  double side = 1.0;
  std::vector<double> omega1{1.0, 0.0};
  std::vector<double> omega2{0.0, 1.0};
  int n = 1;   // Chern / flux integer
  int N = 16;  // grid points per direction

  // thermodynamics
  double T = 0.5;
  double mu = 0.0;
  std::string mu_mode = "absolute";  // absolute | lll_offset (mu = e0 + xi + mu)
  std::optional<double> nu;          // optional particle-number target

  // potential
  std::string potential = "zero";  // zero | gaussian | inverse_power | table
  double depth = 0.0;
  double width = 1.0;
  double kappa = 1.0;
  std::string table_file;

  // stability / sweeps
  int M = 48;
  double tc_tlo = 1e-3;
  double tc_thi = -1.0;  // <= 0: use 2 ||v||_inf + 1
  double tc_tol = 1e-4;
  bool tc_drift = true;
  std::vector<double> b_list;
  std::vector<double> t_list;

  // SCF
  SCFConfig scf;
  std::string scf_seed = "normal";  // normal | unstable-mode
  bool scf_fixed_nu = false;

  // output
  std::string out_prefix = "bdglab";
  bool emit_trace = false;
  int threads = 1;
  unsigned long long seed = 1;

  static RunConfig from_json_file(const std::string& path);
  static RunConfig from_json_text(const std::string& text);
  std::string to_json_text() const;
  void validate() const;

  Lattice make_lattice() const;
  PairPotential make_potential(const Grid& grid) const;

  // resolves mu_mode == "lll_offset": mu_abs = e0 + xi*(mu_abs) + offset
  double resolve_mu(const Grid& grid, const FluxSector& flux, const PotentialOnGrid& v,
                    const SpectralData& lap) const;
};

// All floats are emitted with 17 significant digits for bit-stable files.
std::string format_double(double x);

}  // namespace bdg
