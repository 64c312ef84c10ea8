#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "msc99/analysis.hpp"
#include "msc99/protocol.hpp"

namespace py = pybind11;
using namespace msc99;

namespace {

protocol::ProtocolParams make_params(double c2, int n, int m, int l) {
  return protocol::ProtocolParams::from_c2(c2, n, m, l);
}

protocol::Representation rep_of(const std::string& name) {
  return protocol::representation_from_name(name);
}

quantum::DensityMatrix density_from_matrix(const linalg::Matrix& m) {
  return quantum::DensityMatrix(m, {static_cast<int>(m.rows())});
}

}  // namespace

PYBIND11_MODULE(_msc99, mod) {
  mod.doc() = "MSC(99) coin-tossing protocol simulation and attack analysis";

  py::class_<protocol::ProtocolParams>(mod, "ProtocolParams")
      .def(py::init(&make_params), py::arg("c2"), py::arg("n"), py::arg("m"), py::arg("l"))
      .def_readonly("c", &protocol::ProtocolParams::c)
      .def_readonly("s", &protocol::ProtocolParams::s)
      .def_readonly("n", &protocol::ProtocolParams::n)
      .def_readonly("m", &protocol::ProtocolParams::m)
      .def_readonly("l", &protocol::ProtocolParams::l)
      .def_property_readonly("c2", &protocol::ProtocolParams::c2);

  py::class_<protocol::EffectiveParams>(mod, "EffectiveParams")
      .def_readonly("c_eff", &protocol::EffectiveParams::c_eff)
      .def_readonly("s_eff", &protocol::EffectiveParams::s_eff)
      .def_readonly("t", &protocol::EffectiveParams::t);

  mod.def("effective_params", &protocol::effective_params, py::arg("params"));
  mod.def("parity_length", &protocol::parity_length, py::arg("k"), py::arg("m"));

  mod.def(
      "psi",
      [](int b, const protocol::ProtocolParams& p) { return protocol::psi(b, p).amplitudes; },
      py::arg("b"), py::arg("params"));
  mod.def(
      "phi",
      [](int b, const protocol::ProtocolParams& p, const std::string& rep) {
        return protocol::phi(b, p, rep_of(rep)).amplitudes;
      },
      py::arg("b"), py::arg("params"), py::arg("rep") = "compressed");
  mod.def(
      "parity_mixture",
      [](char party, int b, int k, const protocol::ProtocolParams& p, const std::string& rep) {
        return protocol::parity_mixture(party, b, k, p, rep_of(rep)).rho.entries;
      },
      py::arg("party"), py::arg("b"), py::arg("k"), py::arg("params"),
      py::arg("rep") = "compressed");

  mod.def(
      "run_honest",
      [](const protocol::ProtocolParams& p, std::uint64_t seed, const std::string& rep) {
        return protocol::transcript_to_json(protocol::run_honest(p, seed, rep_of(rep)));
      },
      py::arg("params"), py::arg("seed"), py::arg("rep") = "compressed",
      "Runs the honest protocol; returns the transcript as a JSON string.");
  mod.def(
      "run_attack",
      [](const protocol::ProtocolParams& p, int target, std::uint64_t seed,
         const std::string& rep) {
        return protocol::transcript_to_json(protocol::run_attack(p, target, seed, rep_of(rep)));
      },
      py::arg("params"), py::arg("target"), py::arg("seed"), py::arg("rep") = "compressed",
      "Runs the cheating-Bob* attack; returns the transcript as a JSON string.");
  mod.def(
      "verify_result",
      [](const std::string& transcript_json) {
        return protocol::trit_to_string(
            protocol::verify_result(protocol::transcript_from_json(transcript_json)));
      },
      py::arg("transcript_json"));

  mod.def(
      "trace_distance",
      [](const linalg::Matrix& a, const linalg::Matrix& b) {
        return quantum::trace_distance(density_from_matrix(a), density_from_matrix(b));
      },
      py::arg("rho0"), py::arg("rho1"));
  mod.def(
      "fidelity",
      [](const linalg::Matrix& a, const linalg::Matrix& b) {
        return quantum::fidelity(density_from_matrix(a), density_from_matrix(b));
      },
      py::arg("rho0"), py::arg("rho1"));
  mod.def(
      "helstrom_pe",
      [](const linalg::Matrix& a, const linalg::Matrix& b) {
        return quantum::helstrom_pe(density_from_matrix(a), density_from_matrix(b)).first;
      },
      py::arg("rho0"), py::arg("rho1"));

  mod.def("pe_parity", &analysis::pe_parity, py::arg("q"), py::arg("c_eff"), py::arg("s_eff"));
  mod.def("fidelity_parity", &analysis::fidelity_parity, py::arg("q"), py::arg("c_eff"),
          py::arg("s_eff"));
  mod.def("binomial_overlap_form", &analysis::binomial_overlap_form, py::arg("q"), py::arg("t"));
  mod.def("gaussian_alpha", &analysis::gaussian_alpha, py::arg("q"), py::arg("t"));
  mod.def("fidelity_gaussian", &analysis::fidelity_gaussian, py::arg("alpha"));
  mod.def("pe_complement_gaussian", &analysis::pe_complement_gaussian, py::arg("alpha"));
  mod.def("bias_lower_bound", &analysis::bias_lower_bound, py::arg("params"));
  mod.def("bias_bound_effective", &analysis::bias_bound_effective, py::arg("q_pe"),
          py::arg("q_f"), py::arg("c_eff"), py::arg("s_eff"));
  mod.def("bias_from_K", &analysis::bias_from_K, py::arg("K"));

  py::class_<analysis::Optimum>(mod, "Optimum")
      .def_readonly("K_star", &analysis::Optimum::K_star)
      .def_readonly("bias_star", &analysis::Optimum::bias_star)
      .def_readonly("alpha_star", &analysis::Optimum::alpha_star);
  mod.def("max_bias", &analysis::max_bias);

  py::class_<analysis::OptimalL>(mod, "OptimalL")
      .def_readonly("l_real", &analysis::OptimalL::l_real)
      .def_readonly("l_int", &analysis::OptimalL::l_int)
      .def_readonly("bias_at_int", &analysis::OptimalL::bias_at_int);
  mod.def("optimal_l", &analysis::optimal_l, py::arg("m"));
}
