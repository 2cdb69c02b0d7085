// Python bindings for the core operations: states, work functionals,
// divergence geometry, channels and channel certification.

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ergokit/certify.hpp"
#include "ergokit/channels.hpp"
#include "ergokit/geometry.hpp"
#include "ergokit/json_io.hpp"
#include "ergokit/spectra.hpp"
#include "ergokit/workfn.hpp"

#include <cmath>
#include <limits>

namespace py = pybind11;
using namespace ergokit;

namespace {

double beta_to_float(const Beta& b) {
  return b.infinite ? std::numeric_limits<double>::infinity() : b.value;
}

Beta beta_from_float(double b) {
  if (std::isinf(b)) return Beta::inf();
  return Beta::finite(b);
}

double divergence_to_float(const Divergence& d) {
  return d.infinite ? std::numeric_limits<double>::infinity() : d.value;
}

Theory theory_from_string(const std::string& t) {
  if (t == "cp") return Theory::CompletelyPassive;
  if (t == "p") return Theory::Passive;
  throw std::invalid_argument("theory must be 'cp' or 'p'");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "work-extraction resources and free-operation certification";

  py::class_<Hamiltonian>(m, "Hamiltonian")
      .def(py::init<RealVector>(), py::arg("eigenvalues"))
      .def(py::init<RealVector, Matrix>(), py::arg("eigenvalues"), py::arg("basis"))
      .def_property_readonly("dim", &Hamiltonian::dim)
      .def_property_readonly("eigenvalues", &Hamiltonian::eigenvalues)
      .def_property_readonly("basis", &Hamiltonian::basis)
      .def("matrix", &Hamiltonian::matrix);

  py::class_<DensityMatrix>(m, "DensityMatrix")
      .def(py::init<const Matrix&>(), py::arg("matrix"))
      .def_property_readonly("dim", &DensityMatrix::dim)
      .def_property_readonly("matrix", &DensityMatrix::matrix);

  py::class_<PassiveState>(m, "PassiveState")
      .def(py::init<RealVector>(), py::arg("populations"))
      .def_property_readonly("populations", &PassiveState::populations)
      .def("to_density", &PassiveState::to_density, py::arg("h"));

  py::class_<GibbsState>(m, "GibbsState")
      .def_property_readonly("beta",
                             [](const GibbsState& g) { return beta_to_float(g.beta()); })
      .def_property_readonly("populations", &GibbsState::populations)
      .def("as_passive", &GibbsState::as_passive)
      .def("to_density", &GibbsState::to_density, py::arg("h"));

  py::class_<BetaSolution>(m, "BetaSolution")
      .def_property_readonly("beta",
                             [](const BetaSolution& s) { return beta_to_float(s.beta); })
      .def_readonly("achieved_entropy", &BetaSolution::achieved_entropy)
      .def_readonly("residual", &BetaSolution::residual);

  py::class_<MonotoneResult>(m, "MonotoneResult")
      .def_readonly("value", &MonotoneResult::value)
      .def_readonly("minimizer", &MonotoneResult::minimizer)
      .def_property_readonly("beta",
                             [](const MonotoneResult& r) -> py::object {
                               if (!r.beta) return py::none();
                               return py::float_(beta_to_float(*r.beta));
                             })
      .def_readonly("method", &MonotoneResult::method);

  py::class_<KrausChannel>(m, "KrausChannel")
      .def(py::init<std::vector<Matrix>, std::string>(), py::arg("kraus"),
           py::arg("label") = "")
      .def_property_readonly("dim", &KrausChannel::dim)
      .def_property_readonly("kraus", &KrausChannel::kraus)
      .def_property_readonly("label", &KrausChannel::label);

  // spectra
  m.def("spectral",
        [](const DensityMatrix& rho) {
          const SpectralDecomposition sd = spectral(rho);
          return py::make_tuple(sd.populations, sd.vectors);
        },
        py::arg("rho"));
  m.def("energy", &energy, py::arg("h"), py::arg("rho"));
  m.def("entropy", py::overload_cast<const DensityMatrix&>(&entropy), py::arg("rho"));
  m.def("gibbs",
        [](const Hamiltonian& h, double beta) { return gibbs(h, beta_from_float(beta)); },
        py::arg("h"), py::arg("beta"));
  m.def("passive_rearrangement", &passive_rearrangement, py::arg("h"), py::arg("rho"));
  m.def("is_passive", &is_passive, py::arg("h"), py::arg("rho"), py::arg("tol") = 1e-10);
  m.def("extraction_unitary", &extraction_unitary, py::arg("h"), py::arg("rho"));
  m.def("random_state",
        [](int d, const std::string& measure, std::uint64_t seed) {
          return random_state(d, parse_measure(measure), seed);
        },
        py::arg("d"), py::arg("measure") = "hilbert-schmidt", py::arg("seed") = 0);
  m.def("random_passive",
        py::overload_cast<const Hamiltonian&, std::uint64_t>(&random_passive),
        py::arg("h"), py::arg("seed") = 0);

  // workfn
  m.def("ergotropy", &ergotropy, py::arg("h"), py::arg("rho"));
  m.def("coherent_ergotropy", &coherent_ergotropy, py::arg("h"), py::arg("rho"));
  m.def("beta_of_state", &beta_of_state, py::arg("h"), py::arg("rho"));
  m.def("free_energy", &free_energy, py::arg("h"), py::arg("rho"));
  m.def("ergotropy_ncopy", &ergotropy_ncopy, py::arg("h"), py::arg("rho"), py::arg("n"),
        py::arg("cap") = 2000000);
  m.def("ergo_free_identity_gap", &ergo_free_identity_gap, py::arg("h"), py::arg("rho"));

  // geometry
  m.def("relative_entropy",
        [](const DensityMatrix& a, const DensityMatrix& b) {
          return divergence_to_float(relative_entropy(a, b));
        },
        py::arg("rho"), py::arg("sigma"));
  m.def("tsallis_divergence",
        [](const DensityMatrix& a, const DensityMatrix& b, double alpha) {
          return divergence_to_float(tsallis_divergence(a, b, alpha));
        },
        py::arg("rho"), py::arg("sigma"), py::arg("alpha"));
  m.def("noneq_temperature", &noneq_temperature, py::arg("h"), py::arg("p"), py::arg("rho"));
  m.def("tsallis_temperature_p", &tsallis_temperature_p, py::arg("h"), py::arg("p"),
        py::arg("rho"), py::arg("alpha"));
  m.def("tsallis_temperature_cp", &tsallis_temperature_cp, py::arg("h"), py::arg("gamma"),
        py::arg("rho"), py::arg("alpha"));
  m.def("distance_to_free",
        py::overload_cast<const Hamiltonian&, const DensityMatrix&, const GibbsState&>(
            &distance_to_free),
        py::arg("h"), py::arg("rho"), py::arg("gamma"));
  m.def("distance_to_free",
        py::overload_cast<const Hamiltonian&, const DensityMatrix&, const PassiveState&>(
            &distance_to_free),
        py::arg("h"), py::arg("rho"), py::arg("p"));
  m.def("monotone_mcp", &monotone_Mcp, py::arg("h"), py::arg("rho"));
  m.def("monotone_mp", &monotone_Mp, py::arg("h"), py::arg("rho"));
  m.def("family_mp", &family_Mp, py::arg("h"), py::arg("rho"), py::arg("alpha"),
        py::arg("nu"), py::arg("seed") = 0);
  m.def("family_mcp", &family_Mcp, py::arg("h"), py::arg("rho"), py::arg("alpha"),
        py::arg("nu"));

  // channels
  m.def("apply", &apply, py::arg("channel"), py::arg("rho"));
  m.def("dephasing", &dephasing, py::arg("h"));
  m.def("partial_dephasing", &partial_dephasing, py::arg("h"), py::arg("coeffs"));
  m.def("lambda_beta_map", &lambda_beta_map, py::arg("h"), py::arg("beta"),
        py::arg("sigma_prime"));
  m.def("thermalizing", &thermalizing, py::arg("h"), py::arg("beta"));
  m.def("unitary_channel", &unitary_channel, py::arg("u"), py::arg("label") = "unitary");
  m.def("mixture", &mixture, py::arg("channels"), py::arg("weights"));
  m.def("thermal_operation", &thermal_operation, py::arg("h"), py::arg("h_env"),
        py::arg("beta"), py::arg("seed") = 0);
  m.def("random_channel", &random_channel, py::arg("d"), py::arg("kraus_rank"),
        py::arg("seed") = 0);
  m.def("selective_outcomes",
        [](const KrausChannel& ch, const DensityMatrix& rho) {
          std::vector<std::pair<double, Matrix>> out;
          for (const SelectiveOutcome& o : selective_outcomes(ch, rho)) {
            out.emplace_back(o.probability, o.post_state.matrix());
          }
          return out;
        },
        py::arg("channel"), py::arg("rho"));
  m.def("is_unital", &is_unital, py::arg("channel"));
  m.def("choi_matrix", &choi_matrix, py::arg("channel"));

  // certification (reports returned as JSON text)
  m.def("classify_json",
        [](const std::string& channel_json, const Hamiltonian& h, const std::string& theory,
           std::int64_t trials, std::uint64_t seed, double tol, int starts) {
          const AnyChannel ch = any_channel_from_json(nlohmann::json::parse(channel_json), h);
          CertifyConfig cfg;
          cfg.trials = trials;
          cfg.seed = seed;
          cfg.tolerance = tol;
          cfg.starts = starts;
          const ClassificationReport rep = classify(ch, h, theory_from_string(theory), cfg);
          return report_to_json(rep, h).dump();
        },
        py::arg("channel_json"), py::arg("h"), py::arg("theory"), py::arg("trials") = 500,
        py::arg("seed") = 42, py::arg("tol") = 1e-8, py::arg("starts") = 8);
  m.def("channel_to_json",
        [](const KrausChannel& ch) { return channel_to_json(ch).dump(); }, py::arg("channel"));
  m.def("state_to_json",
        [](const Hamiltonian& h, const DensityMatrix& rho) {
          return state_to_json(h, rho).dump();
        },
        py::arg("h"), py::arg("rho"));

  m.attr("__version__") = "0.1.0";
}
