#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "bdglab/config.hpp"
#include "bdglab/scf.hpp"

namespace py = pybind11;
using namespace bdg;

namespace {

PairPotential potential_from_kwargs(const std::string& kind, double depth, double width,
                                    double kappa) {
  if (kind == "zero") return PairPotential::zero();
  if (kind == "gaussian") return PairPotential::gaussian(depth, width);
  if (kind == "inverse_power") return PairPotential::inverse_power(kappa);
  throw ConfigError("unknown potential kind: " + kind);
}

}  // namespace

PYBIND11_MODULE(_bdglab, m) {
  m.doc() = "stationary Bogoliubov-de Gennes laboratory on a magnetic lattice cell";

  py::class_<Lattice>(m, "Lattice")
      .def(py::init([](const Vec2& w1, const Vec2& w2) { return Lattice(w1, w2); }))
      .def_static("square", &Lattice::square)
      .def_static("triangular", &Lattice::triangular)
      .def_readonly("area", &Lattice::area)
      .def_readonly("omega1", &Lattice::omega1)
      .def_readonly("omega2", &Lattice::omega2);

  py::class_<FluxSector>(m, "FluxSector")
      .def_readonly("n", &FluxSector::n)
      .def_readonly("b", &FluxSector::b);
  m.def("make_flux_sector", &make_flux_sector);

  py::class_<Cocycle>(m, "Cocycle")
      .def(py::init<const Lattice&, const FluxSector&>())
      .def("eval", &Cocycle::eval);
  m.def("chern_number", &chern_number);
  m.def("symmetric_gauge_potential", &symmetric_gauge_potential);

  py::class_<Grid>(m, "Grid")
      .def(py::init<const Lattice&, int>())
      .def_readonly("N", &Grid::N)
      .def_readonly("cell_weight", &Grid::cell_weight)
      .def("dim", &Grid::dim);

  m.def("magnetic_laplacian",
        [](const Grid& g, const FluxSector& f) { return magnetic_laplacian(g, f); });
  m.def("magnetic_translation", &magnetic_translation);
  m.def(
      "laplacian_spectrum",
      [](const Grid& g, const FluxSector& f) {
        const SpectralData sd = diagonalize(magnetic_laplacian(g, f));
        return sd.eigenvalues;
      },
      "eigenvalues of -Delta_{a_b} on the twisted cell");
  m.def("cluster_labels", &cluster_labels);
  m.def("scalar_f", &scalar_f);
  m.def("fermi_occupation", &fermi_occupation);

  py::class_<Thermo>(m, "Thermo")
      .def(py::init([](double T, double mu) { return Thermo{T, mu}; }), py::arg("T"),
           py::arg("mu"))
      .def_readwrite("T", &Thermo::T)
      .def_readwrite("mu", &Thermo::mu);

  py::class_<PotentialOnGrid>(m, "PotentialOnGrid")
      .def_readonly("integral", &PotentialOnGrid::integral)
      .def_readonly("sup_norm", &PotentialOnGrid::sup_norm);
  m.def(
      "sample_potential",
      [](const Grid& g, const std::string& kind, double depth, double width, double kappa) {
        return sample_potential(potential_from_kwargs(kind, depth, width, kappa), g);
      },
      py::arg("grid"), py::arg("kind"), py::arg("depth") = 0.0, py::arg("width") = 1.0,
      py::arg("kappa") = 1.0);

  py::class_<NormalState>(m, "NormalState")
      .def_readonly("xi", &NormalState::xi)
      .def_readonly("gamma", &NormalState::gamma)
      .def_readonly("h_evals", &NormalState::h_evals);
  m.def("normal_state",
        [](const Thermo& th, const FluxSector& f, const PotentialOnGrid& v, const Grid& g) {
          return normal_state(th, f, v, g);
        });
  m.def("self_consistency_residual", &self_consistency_residual);

  py::class_<StabilityOperator>(m, "StabilityOperator")
      .def_readonly("Kdiag", &StabilityOperator::Kdiag)
      .def_readonly("coverage_warning", &StabilityOperator::coverage_warning)
      .def("L", &StabilityOperator::L)
      .def("sym_dim", &StabilityOperator::sym_dim);
  m.def("build_L", &build_L);

  py::class_<LowestMode>(m, "LowestMode")
      .def_readonly("lambda_min", &LowestMode::lambda_min)
      .def_readonly("alpha_grid", &LowestMode::alpha_grid);
  m.def("lowest_eigenvalue", &lowest_eigenvalue);

  py::class_<TcResult>(m, "TcResult")
      .def_readonly("tc", &TcResult::tc)
      .def_readonly("lambda_lo", &TcResult::lambda_lo)
      .def_readonly("lambda_hi", &TcResult::lambda_hi)
      .def_readonly("m_doubled_drift", &TcResult::m_doubled_drift)
      .def_property_readonly("verdict", [](const TcResult& r) {
        switch (r.verdict) {
          case TcResult::Verdict::Found: return "found";
          case TcResult::Verdict::StableEverywhere: return "stable-everywhere";
          default: return "unstable-everywhere";
        }
      });
  m.def("critical_temperature", &critical_temperature, py::arg("flux"), py::arg("v"),
        py::arg("mu"), py::arg("grid"), py::arg("M"), py::arg("t_lo") = 1e-3,
        py::arg("t_hi") = -1.0, py::arg("tol") = 1e-4, py::arg("drift_check") = false);

  py::class_<SCFConfig>(m, "SCFConfig")
      .def(py::init<>())
      .def_readwrite("damping", &SCFConfig::damping)
      .def_readwrite("max_iter", &SCFConfig::max_iter)
      .def_readwrite("tol_gamma", &SCFConfig::tol_gamma)
      .def_readwrite("tol_ampere", &SCFConfig::tol_ampere)
      .def_readwrite("fixed_nu", &SCFConfig::fixed_nu)
      .def_readwrite("seed_rank", &SCFConfig::seed_rank)
      .def_property(
          "seed",
          [](const SCFConfig& c) {
            return c.seed == SCFConfig::Seed::UnstableMode ? "unstable-mode" : "normal";
          },
          [](SCFConfig& c, const std::string& s) {
            c.seed = (s == "unstable-mode") ? SCFConfig::Seed::UnstableMode
                                            : SCFConfig::Seed::Normal;
          });

  py::class_<BdGState>(m, "BdGState")
      .def_readonly("gamma", &BdGState::gamma)
      .def_readonly("alpha", &BdGState::alpha);

  py::class_<SCFResult>(m, "SCFResult")
      .def_readonly("residual", &SCFResult::residual)
      .def_readonly("iterations", &SCFResult::iterations)
      .def_readonly("free_energy", &SCFResult::free_energy)
      .def_readonly("state", &SCFResult::state)
      .def_readonly("mu", &SCFResult::mu)
      .def_property_readonly("order_parameter",
                             [](const SCFResult& r) { return order_parameter(r.state); })
      .def_property_readonly("verdict", [](const SCFResult& r) {
        switch (r.verdict) {
          case SCFResult::Verdict::Converged: return "converged";
          case SCFResult::Verdict::Stalled: return "stalled";
          default: return "diverged";
        }
      });
  m.def("scf_solve", &scf_solve);
}
