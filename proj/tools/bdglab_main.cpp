// bdglab command line: spectrum | normal | tc | scf | check
//
// Exit codes: 0 success, 2 configuration error, 3 numerical failure.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <numbers>
#include <random>

#include <CLI11.hpp>
#include <json.hpp>

#include "bdglab/config.hpp"
#include "bdglab/errors.hpp"

using namespace bdg;
using nlohmann::json;

namespace {

struct Problem {
  Lattice lat;
  FluxSector flux;
  Grid grid;
  PotentialOnGrid v;
  SpectralData lap;
  double mu_abs;
};

Problem setup(const RunConfig& cfg) {
  const Lattice lat = cfg.make_lattice();
  const FluxSector flux = make_flux_sector(lat, cfg.n);
  Grid grid(lat, cfg.N);
  PotentialOnGrid v = sample_potential(cfg.make_potential(grid), grid);
  SpectralData lap = diagonalize(magnetic_laplacian(grid, flux));
  const double mu_abs = cfg.resolve_mu(grid, flux, v, lap);
  return Problem{lat, flux, std::move(grid), std::move(v), std::move(lap), mu_abs};
}

int cmd_spectrum(const RunConfig& cfg) {
  const Problem p = setup(cfg);
  const auto labels = cluster_labels(p.lap.eigenvalues, p.flux.b);
  std::ofstream out(cfg.out_prefix + "_spectrum.csv");
  out << "index,eigenvalue,cluster_id\n";
  for (int i = 0; i < p.lap.eigenvalues.size(); ++i) {
    out << i << "," << format_double(p.lap.eigenvalues(i)) << "," << labels[i] << "\n";
  }
  std::cout << "wrote " << cfg.out_prefix << "_spectrum.csv (" << p.lap.eigenvalues.size()
            << " rows)\n";
  return 0;
}

int cmd_normal(const RunConfig& cfg) {
  const Problem p = setup(cfg);
  const Thermo th{cfg.T, p.mu_abs};
  const NormalState ns = normal_state(th, p.flux, p.v, p.grid, p.lap);
  const XiSolveResult xs = solve_xi(th, p.v.integral, p.lap.eigenvalues, p.grid.lat.area);
  const UniquenessReport ur = verify_uniqueness_amp(ns, p.grid);
  const VectorPotential a = VectorPotential::uniform(p.grid.lat, p.flux, p.grid.N);
  const auto j = current(ns.gamma, p.grid, a);
  const double f_t = free_energy(ns.state(), a, p.grid, p.v, th);

  json out;
  out["xi"] = format_double(ns.xi);
  out["residual"] = format_double(xs.residual);
  out["xi_bisect_newton_gap"] = format_double(std::abs(xs.xi - xs.xi_bisect));
  out["density_mean"] = format_double(ur.den_mean);
  out["density_spread"] = format_double(ur.den_spread);
  out["current_sup"] = format_double(j.cwiseAbs().maxCoeff());
  out["F_T"] = format_double(f_t);
  out["mu"] = format_double(p.mu_abs);
  out["self_consistency"] = format_double(self_consistency_residual(ns, p.grid, p.v));
  out["roots"] = json::array();
  for (double r : xs.roots) out["roots"].push_back(format_double(r));
  std::ofstream f(cfg.out_prefix + "_normal.json");
  f << out.dump(2) << "\n";
  std::cout << "wrote " << cfg.out_prefix << "_normal.json (xi=" << format_double(ns.xi)
            << ")\n";
  return 0;
}

int cmd_tc(const RunConfig& cfg) {
  std::vector<double> bs = cfg.b_list;
  if (bs.empty()) {
    const Lattice lat = cfg.make_lattice();
    bs = {make_flux_sector(lat, cfg.n).b};
  }
  const Lattice shape = cfg.make_lattice();
  std::ofstream out(cfg.out_prefix + "_tc.csv");
  out << "b,T_c_or_verdict,lambda_min_at_bracket_lo,lambda_min_at_bracket_hi,M,M_doubled_drift\n";
  for (double b : bs) {
    const double scale = std::sqrt(2.0 * std::numbers::pi * cfg.n / (b * shape.area));
    const Lattice lat(scale * shape.omega1, scale * shape.omega2);
    const FluxSector flux = make_flux_sector(lat, cfg.n);
    const Grid grid(lat, cfg.N);
    const PotentialOnGrid v = sample_potential(cfg.make_potential(grid), grid);
    const SpectralData lap = diagonalize(magnetic_laplacian(grid, flux));
    const double mu_abs = cfg.resolve_mu(grid, flux, v, lap);
    const TcResult tc = critical_temperature(flux, v, mu_abs, grid, std::min(cfg.M, grid.dim()),
                                             cfg.tc_tlo, cfg.tc_thi, cfg.tc_tol, cfg.tc_drift);
    std::string verdict;
    switch (tc.verdict) {
      case TcResult::Verdict::Found: verdict = format_double(tc.tc); break;
      case TcResult::Verdict::StableEverywhere: verdict = "stable-everywhere"; break;
      case TcResult::Verdict::UnstableEverywhere: verdict = "unstable-everywhere"; break;
    }
    out << format_double(b) << "," << verdict << "," << format_double(tc.lambda_lo) << ","
        << format_double(tc.lambda_hi) << "," << std::min(cfg.M, grid.dim()) << ","
        << format_double(tc.m_doubled_drift) << "\n";
  }
  std::cout << "wrote " << cfg.out_prefix << "_tc.csv (" << bs.size() << " rows)\n";
  return 0;
}

int cmd_scf(const RunConfig& cfg) {
  const Problem p = setup(cfg);
  const Thermo th{cfg.T, p.mu_abs};
  SCFConfig sc = cfg.scf;
  sc.seed = (cfg.scf_seed == "unstable-mode") ? SCFConfig::Seed::UnstableMode
                                              : SCFConfig::Seed::Normal;
  sc.fixed_nu = cfg.scf_fixed_nu;
  if (cfg.nu) sc.nu = *cfg.nu;
  sc.trace_states = cfg.emit_trace;
  if (sc.seed_rank == 0) sc.seed_rank = std::min(cfg.M, p.grid.dim());

  const SCFResult r = scf_solve(th, p.flux, p.v, p.grid, sc);
  const EquivarianceReport eq = equivariance_check(r, p.grid);
  const EnergyComparison cmp = energy_comparison(r, th, p.grid, p.v);

  json out;
  switch (r.verdict) {
    case SCFResult::Verdict::Converged: out["verdict"] = "converged"; break;
    case SCFResult::Verdict::Stalled: out["verdict"] = "stalled"; break;
    case SCFResult::Verdict::Diverged: out["verdict"] = "diverged"; break;
  }
  out["iterations"] = r.iterations;
  out["residual"] = format_double(r.residual);
  out["ampere_residual"] = format_double(r.ampere_residual);
  out["order_parameter"] = format_double(order_parameter(r.state));
  out["free_energy"] = format_double(r.free_energy);
  out["delta_F_vs_normal"] = format_double(cmp.delta);
  out["mu_final"] = format_double(r.mu);
  out["nu"] = format_double(r.nu);
  out["lambda_min_seed"] = format_double(r.lambda_min_seed);
  out["seed_amplitude"] = format_double(r.seed_amplitude);
  out["equivariance_gamma"] = format_double(eq.gamma_residual);
  out["equivariance_e"] = format_double(eq.e_translation);
  out["flux_integer"] = format_double(eq.flux_integer);
  out["reflection_residual"] = format_double(eq.reflection_residual);
  std::ofstream f(cfg.out_prefix + "_scf.json");
  f << out.dump(2) << "\n";
  if (cfg.emit_trace) {
    std::ofstream tr(cfg.out_prefix + "_scf_trace.ndjson");
    for (const auto& row : r.trace) {
      json rj;
      rj["iter"] = row.iter;
      rj["residual"] = format_double(row.residual);
      rj["ampere_residual"] = format_double(row.ampere_residual);
      rj["free_energy"] = format_double(row.free_energy);
      rj["alpha_hs"] = format_double(row.alpha_hs);
      rj["mu"] = format_double(row.mu);
      tr << rj.dump() << "\n";
    }
  }
  std::cout << "wrote " << cfg.out_prefix << "_scf.json (" << out["verdict"].get<std::string>()
            << ", |alpha|=" << format_double(order_parameter(r.state)) << ")\n";
  if (r.verdict == SCFResult::Verdict::Diverged) return 3;
  return 0;
}

int cmd_check(const RunConfig& cfg) {
  int failures = 0;
  const auto require = [&](bool ok, const std::string& what) {
    std::cout << (ok ? "PASS " : "FAIL ") << what << "\n";
    if (!ok) ++failures;
  };
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);

  const Lattice lat = cfg.make_lattice();
  const FluxSector flux = make_flux_sector(lat, cfg.n);
  const Cocycle chi(lat, flux);

  double worst = 0.0;
  const Vec2 svecs[3] = {lat.omega1, lat.omega2, lat.omega1 + lat.omega2};
  for (int trial = 0; trial < 100; ++trial) {
    const Vec2 x(unif(rng) * 3.0, unif(rng) * 3.0);
    for (const Vec2& s : svecs) {
      for (const Vec2& t : svecs) {
        const double r = chi.eval(s + t, x) - chi.eval(s, x + t) - chi.eval(t, x);
        const double frac = std::abs(r / (2.0 * std::numbers::pi) -
                                     std::round(r / (2.0 * std::numbers::pi)));
        worst = std::max(worst, frac * 2.0 * std::numbers::pi);
      }
    }
  }
  require(worst < 1e-9, "cocycle identity residue < 1e-9 (worst " + format_double(worst) + ")");

  bool chern_ok = true;
  const int c0 = chern_number(chi, Vec2(0, 0));
  for (int trial = 0; trial < 50; ++trial) {
    const Vec2 x(unif(rng) * 2.0, unif(rng) * 2.0);
    if (chern_number(chi, x) != c0) chern_ok = false;
  }
  require(chern_ok && c0 == cfg.n, "chern number = n and x-independent");

  const Grid grid(lat, std::min(cfg.N, 12));
  const SpectralData lap = diagonalize(magnetic_laplacian(grid, flux));
  require(lap.eigenvalues(0) > -1e-10, "magnetic Laplacian positive semi-definite");

  // func_calc homomorphism on the Laplacian
  const OperatorRep h{magnetic_laplacian(grid, flux), OperatorBasis::Grid};
  const auto g1 = [](double x) { return std::exp(-x); };
  const auto g2 = [](double x) { return x * x; };
  const Mat lhs = func_calc(h, [&](double x) { return g1(g2(x)); }).m;
  const Mat rhs = func_calc(func_calc(h, g2), g1).m;
  require((lhs - rhs).norm() < 1e-9 * std::max(1.0, lhs.norm()),
          "func_calc composition law");

  // admissibility closure of the Gibbs map on random states
  const PotentialOnGrid v = sample_potential(PairPotential::gaussian(-0.5, 0.7), grid);
  const VectorPotential a = VectorPotential::uniform(lat, flux, grid.N);
  bool closure = true;
  for (int trial = 0; trial < 5; ++trial) {
    Mat hrand = Mat::Random(grid.dim(), grid.dim());
    hrand = 0.5 * (hrand + hrand.adjoint()).eval();
    BdGState s;
    s.gamma = func_calc(diagonalize(hrand), [](double e) { return fermi_occupation(e, 0.7); });
    s.alpha = Mat::Zero(grid.dim(), grid.dim());
    const BdGState g = gibbs_map(s, a, grid, v, Thermo{0.4, 0.3});
    if (!check_admissible(g).admissible()) closure = false;
  }
  require(closure, "gibbs_map preserves admissibility");

  // Hessian kernel floor
  const NormalState ns = normal_state(Thermo{cfg.T, cfg.mu}, flux, v, grid, lap);
  const StabilityOperator L = build_L(ns, grid, v, std::min(cfg.M, grid.dim()));
  require(L.Kdiag.minCoeff() >= cfg.T - 1e-12,
          "K >= T (min " + format_double(L.Kdiag.minCoeff()) + ")");

  double fmin = 10.0;
  for (int i = 0; i <= 200; ++i) {
    for (int j = 0; j <= 200; ++j) {
      fmin = std::min(fmin, scalar_f(-10.0 + 0.1 * i, -10.0 + 0.1 * j));
    }
  }
  require(fmin >= 1.0 - 1e-12, "scalar_f >= 1 on the grid scan");

  std::cout << (failures == 0 ? "CHECK OK" : "CHECK FAILED") << "\n";
  return failures == 0 ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"stationary BdG laboratory on a magnetic lattice cell"};
  app.require_subcommand(1);

  std::string config_path;
  RunConfig cfg;
  bool have_cfg = false;

  // shared options, applied as overrides after the config file loads
  struct Overrides {
    std::optional<double> T, mu, side, depth, width, kappa;
    std::optional<int> N, n, M, threads;
    std::optional<std::string> potential, out_prefix, mu_mode, scf_seed, lattice;
    std::optional<bool> fixed_nu, trace;
  } ov;

  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("-c,--config", config_path, "JSON config file");
    sub->add_option("--T", ov.T, "temperature");
    sub->add_option("--mu", ov.mu, "chemical potential (or offset in lll_offset mode)");
    sub->add_option("--mu-mode", ov.mu_mode, "absolute | lll_offset");
    sub->add_option("--N", ov.N, "grid points per direction");
    sub->add_option("--n", ov.n, "flux integer");
    sub->add_option("--M", ov.M, "truncation rank");
    sub->add_option("--side", ov.side, "lattice side");
    sub->add_option("--lattice", ov.lattice, "square | triangular | custom");
    sub->add_option("--potential", ov.potential, "zero | gaussian | inverse_power | table");
    sub->add_option("--depth", ov.depth, "gaussian depth");
    sub->add_option("--width", ov.width, "gaussian width");
    sub->add_option("--kappa", ov.kappa, "inverse power exponent");
    sub->add_option("--out", ov.out_prefix, "output path prefix");
    sub->add_option("--threads", ov.threads, "worker threads (or BDGLAB_THREADS)");
    sub->add_option("--scf-seed", ov.scf_seed, "normal | unstable-mode");
    sub->add_flag("--fixed-nu", [&](std::int64_t) { ov.fixed_nu = true; },
                  "hold Tr gamma fixed during SCF");
    sub->add_flag("--trace", [&](std::int64_t) { ov.trace = true; },
                  "emit per-iteration NDJSON trace");
  };

  auto* sp = app.add_subcommand("spectrum", "magnetic Laplacian spectrum and Landau clusters");
  auto* no = app.add_subcommand("normal", "self-consistent mt-invariant normal state");
  auto* tc = app.add_subcommand("tc", "critical temperature sweep over b");
  auto* sc = app.add_subcommand("scf", "self-consistent vortex-lattice solve");
  auto* ck = app.add_subcommand("check", "run the invariant suite");
  for (auto* sub : {sp, no, tc, sc, ck}) add_common(sub);

  CLI11_PARSE(app, argc, argv);

  try {
    if (!config_path.empty()) {
      cfg = RunConfig::from_json_file(config_path);
      have_cfg = true;
    }
    if (!have_cfg) cfg = RunConfig{};
    if (ov.T) cfg.T = *ov.T;
    if (ov.mu) cfg.mu = *ov.mu;
    if (ov.mu_mode) cfg.mu_mode = *ov.mu_mode;
    if (ov.N) cfg.N = *ov.N;
    if (ov.n) cfg.n = *ov.n;
    if (ov.M) cfg.M = *ov.M;
    if (ov.side) cfg.side = *ov.side;
    if (ov.lattice) cfg.lattice_kind = *ov.lattice;
    if (ov.potential) cfg.potential = *ov.potential;
    if (ov.depth) cfg.depth = *ov.depth;
    if (ov.width) cfg.width = *ov.width;
    if (ov.kappa) cfg.kappa = *ov.kappa;
    if (ov.out_prefix) cfg.out_prefix = *ov.out_prefix;
    if (ov.threads) cfg.threads = *ov.threads;
    if (ov.scf_seed) cfg.scf_seed = *ov.scf_seed;
    if (ov.fixed_nu) cfg.scf_fixed_nu = *ov.fixed_nu;
    if (ov.trace) cfg.emit_trace = *ov.trace;
    if (const char* env = std::getenv("BDGLAB_THREADS")) {
      cfg.threads = std::max(1, std::atoi(env));
    }
    cfg.validate();

    if (sp->parsed()) return cmd_spectrum(cfg);
    if (no->parsed()) return cmd_normal(cfg);
    if (tc->parsed()) return cmd_tc(cfg);
    if (sc->parsed()) return cmd_scf(cfg);
    if (ck->parsed()) return cmd_check(cfg);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
