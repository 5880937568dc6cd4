#include "bdglab/config.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "bdglab/errors.hpp"
#include "bdglab/normal.hpp"

namespace bdg {

using nlohmann::json;

std::string format_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

namespace {

template <typename T>
void get_if(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

RunConfig RunConfig::from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  RunConfig c;
  try {
    get_if(j, "lattice", c.lattice_kind);
    get_if(j, "side", c.side);
    get_if(j, "omega1", c.omega1);
    get_if(j, "omega2", c.omega2);
    get_if(j, "n", c.n);
    get_if(j, "N", c.N);
    get_if(j, "T", c.T);
    get_if(j, "mu", c.mu);
    get_if(j, "mu_mode", c.mu_mode);
    if (j.contains("nu") && !j.at("nu").is_null()) c.nu = j.at("nu").get<double>();
    get_if(j, "potential", c.potential);
    get_if(j, "depth", c.depth);
    get_if(j, "width", c.width);
    get_if(j, "kappa", c.kappa);
    get_if(j, "table_file", c.table_file);
    get_if(j, "M", c.M);
    get_if(j, "tc_tlo", c.tc_tlo);
    get_if(j, "tc_thi", c.tc_thi);
    get_if(j, "tc_tol", c.tc_tol);
    get_if(j, "tc_drift", c.tc_drift);
    get_if(j, "b_list", c.b_list);
    get_if(j, "t_list", c.t_list);
    get_if(j, "scf_damping", c.scf.damping);
    get_if(j, "scf_max_iter", c.scf.max_iter);
    get_if(j, "scf_tol_gamma", c.scf.tol_gamma);
    get_if(j, "scf_tol_ampere", c.scf.tol_ampere);
    get_if(j, "scf_ampere_every", c.scf.ampere_every);
    get_if(j, "scf_seed", c.scf_seed);
    get_if(j, "scf_fixed_nu", c.scf_fixed_nu);
    get_if(j, "scf_seed_rank", c.scf.seed_rank);
    get_if(j, "out_prefix", c.out_prefix);
    get_if(j, "emit_trace", c.emit_trace);
    get_if(j, "threads", c.threads);
    get_if(j, "seed", c.seed);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config field error: ") + e.what());
  }
  return c;
}

RunConfig RunConfig::from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json_text(ss.str());
}

std::string RunConfig::to_json_text() const {
  json j;
  j["lattice"] = lattice_kind;
  j["side"] = side;
  j["omega1"] = omega1;
  j["omega2"] = omega2;
  j["n"] = n;
  j["N"] = N;
  j["T"] = T;
  j["mu"] = mu;
  j["mu_mode"] = mu_mode;
  if (nu) j["nu"] = *nu;
  j["potential"] = potential;
  j["depth"] = depth;
  j["width"] = width;
  j["kappa"] = kappa;
  j["table_file"] = table_file;
  j["M"] = M;
  j["tc_tlo"] = tc_tlo;
  j["tc_thi"] = tc_thi;
  j["tc_tol"] = tc_tol;
  j["tc_drift"] = tc_drift;
  j["b_list"] = b_list;
  j["t_list"] = t_list;
  j["scf_damping"] = scf.damping;
  j["scf_max_iter"] = scf.max_iter;
  j["scf_tol_gamma"] = scf.tol_gamma;
  j["scf_tol_ampere"] = scf.tol_ampere;
  j["scf_ampere_every"] = scf.ampere_every;
  j["scf_seed"] = scf_seed;
  j["scf_fixed_nu"] = scf_fixed_nu;
  j["scf_seed_rank"] = scf.seed_rank;
  j["out_prefix"] = out_prefix;
  j["emit_trace"] = emit_trace;
  j["threads"] = threads;
  j["seed"] = seed;
  return j.dump(2);
}

void RunConfig::validate() const {
  if (lattice_kind != "square" && lattice_kind != "triangular" && lattice_kind != "custom") {
    throw ConfigError("unknown lattice kind: " + lattice_kind);
  }
  if (N < 4) throw ConfigError("N must be >= 4");
  if (T < 1e-4) throw ConfigError("T must be >= 1e-4");
  if (M < 1) throw ConfigError("M must be >= 1");
  if (potential != "zero" && potential != "gaussian" && potential != "inverse_power" &&
      potential != "table") {
    throw ConfigError("unknown potential kind: " + potential);
  }
  if (scf.damping <= 0.0 || scf.damping > 1.0) throw ConfigError("scf_damping must be in (0, 1]");
  if (scf.max_iter < 1) throw ConfigError("scf_max_iter must be >= 1");
  if (scf.tol_gamma <= 0.0 || scf.tol_ampere <= 0.0) {
    throw ConfigError("SCF tolerances must be positive");
  }
  if (scf_seed != "normal" && scf_seed != "unstable-mode") {
    throw ConfigError("scf_seed must be 'normal' or 'unstable-mode'");
  }
  if (mu_mode != "absolute" && mu_mode != "lll_offset") {
    throw ConfigError("mu_mode must be 'absolute' or 'lll_offset'");
  }
  if (threads < 1) throw ConfigError("threads must be >= 1");
  if (side <= 0.0) throw ConfigError("side must be positive");
}

Lattice RunConfig::make_lattice() const {
  if (lattice_kind == "square") return Lattice::square(side);
  if (lattice_kind == "triangular") return Lattice::triangular(side);
  return Lattice(Vec2(omega1[0], omega1[1]), Vec2(omega2[0], omega2[1]));
}

PairPotential RunConfig::make_potential(const Grid& grid) const {
  if (potential == "zero") return PairPotential::zero();
  if (potential == "gaussian") return PairPotential::gaussian(depth, width);
  if (potential == "inverse_power") return PairPotential::inverse_power(kappa);
  PairPotential p;
  p.kind = PairPotential::Kind::Table;
  std::ifstream in(table_file);
  if (!in) throw ConfigError("cannot open potential table: " + table_file);
  double x;
  while (in >> x) p.table.push_back(x);
  if (static_cast<int>(p.table.size()) != grid.dim()) {
    throw ConfigError("potential table size does not match N^2");
  }
  return p;
}

double RunConfig::resolve_mu(const Grid& grid, const FluxSector& flux, const PotentialOnGrid& v,
                             const SpectralData& lap) const {
  if (mu_mode == "absolute") return mu;
  // place the Fermi level at the shifted lowest Landau level plus an offset
  double m = lap.eigenvalues(0) + mu;
  for (int i = 0; i < 200; ++i) {
    const XiSolveResult xs = solve_xi(Thermo{T, m}, v.integral, lap.eigenvalues, grid.lat.area);
    const double m_new = lap.eigenvalues(0) + xs.xi + mu;
    if (std::abs(m_new - m) < 1e-13) return m_new;
    m = m_new;
  }
  return m;
}

}  // namespace bdg
