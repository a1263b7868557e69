#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "mimobc/baselines.hpp"
#include "mimobc/channel.hpp"
#include "mimobc/distributions.hpp"
#include "mimobc/precoding.hpp"
#include "mimobc/selection.hpp"

namespace py = pybind11;
using namespace mimobc;

PYBIND11_MODULE(_core, m) {
  m.doc() = "Eigenmode selection, zero-forcing precoding and sum-rate baselines for MIMO broadcast channels";
  m.attr("__version__") = "0.1.0";

  py::class_<RngStream>(m, "RngStream")
      .def(py::init<std::uint64_t>(), py::arg("key"))
      .def("next_u64", &RngStream::next_u64)
      .def("uniform01", &RngStream::uniform01)
      .def("gaussian", &RngStream::gaussian);
  m.def("channel_stream", &RngStream::channel_stream, py::arg("seed"), py::arg("trial"), py::arg("user"));
  m.def("task_stream", &RngStream::task_stream, py::arg("seed"), py::arg("trial"), py::arg("tag"));

  py::class_<ChannelMatrix>(m, "ChannelMatrix")
      .def(py::init<>())
      .def_readwrite("user_id", &ChannelMatrix::user_id)
      .def_readwrite("entries", &ChannelMatrix::entries)
      .def_property_readonly("K", &ChannelMatrix::receive_antennas)
      .def_property_readonly("M", &ChannelMatrix::transmit_antennas);

  py::class_<EigenMode>(m, "EigenMode")
      .def(py::init<>())
      .def_readwrite("user_id", &EigenMode::user_id)
      .def_readwrite("mode_index", &EigenMode::mode_index)
      .def_readwrite("lambda_", &EigenMode::lambda)
      .def_readwrite("right_vector", &EigenMode::right_vector)
      .def_readwrite("left_vector", &EigenMode::left_vector);

  py::class_<FeedbackLedger>(m, "FeedbackLedger")
      .def_readonly("real_values_fed_back", &FeedbackLedger::real_values_fed_back)
      .def_readonly("rounds", &FeedbackLedger::rounds)
      .def_readonly("per_round_survivors", &FeedbackLedger::per_round_survivors);

  py::class_<SelectionResult>(m, "SelectionResult")
      .def_readonly("coordinates", &SelectionResult::coordinates)
      .def_readonly("gamma_scores", &SelectionResult::gamma_scores)
      .def_readonly("shortfall", &SelectionResult::shortfall)
      .def_readonly("ledger", &SelectionResult::ledger);

  py::enum_<ThresholdMode>(m, "ThresholdMode")
      .value("fixed", ThresholdMode::fixed)
      .value("theorem1_necessary", ThresholdMode::theorem1_necessary)
      .value("theorem2_sufficient", ThresholdMode::theorem2_sufficient)
      .value("remark1_refined", ThresholdMode::remark1_refined)
      .value("fig1_empirical", ThresholdMode::fig1_empirical);

  py::class_<ThresholdPreset>(m, "ThresholdPreset")
      .def(py::init<>())
      .def_readwrite("mode", &ThresholdPreset::mode)
      .def_readwrite("rho_offset", &ThresholdPreset::rho_offset)
      .def("value_at", &ThresholdPreset::value_at, py::arg("N"), py::arg("M"), py::arg("K"))
      .def("beta_at", &ThresholdPreset::beta_at, py::arg("N"), py::arg("M"));
  m.def("threshold_value", &threshold_preset, py::arg("N"), py::arg("M"), py::arg("K"), py::arg("preset"));

  m.def(
      "sample_channel",
      [](int K, int M, RngStream& s, int user_id) { return sample_channel(K, M, s, user_id); },
      py::arg("K"), py::arg("M"), py::arg("stream"), py::arg("user_id") = 0);
  m.def("svd_modes", &svd_modes, py::arg("channel"));
  m.def("orthogonality", &orthogonality, py::arg("v"), py::arg("psi"));
  m.def("orthogonality_defect", &orthogonality_defect, py::arg("rows"));

  m.def("wishart_unordered_eig_pdf", &wishart_unordered_eig_pdf, py::arg("lam"), py::arg("M"), py::arg("K"));
  m.def("lambda_max_tail", &lambda_max_tail, py::arg("t"), py::arg("M"), py::arg("K"));
  m.def("frobenius_tail", &frobenius_tail, py::arg("x"), py::arg("M"), py::arg("K"));
  m.def("overlap_pdf", &overlap_pdf, py::arg("z"), py::arg("M"));
  m.def("projection_beta_pdf", &projection_beta_pdf, py::arg("z"), py::arg("i"), py::arg("M"));
  m.def("incomplete_beta", &incomplete_beta, py::arg("r"), py::arg("s"), py::arg("x"));

  m.def(
      "preselect_modes",
      [](const std::vector<EigenMode>& modes, double t) { return preselect(modes, t); },
      py::arg("modes"), py::arg("t"));
  m.def(
      "greedy_select",
      [](const std::vector<EigenMode>& modes, double t, int M) { return greedy_select(preselect(modes, t), M); },
      py::arg("modes"), py::arg("t"), py::arg("M"));
  m.def("interactive_select", &interactive_select, py::arg("modes"), py::arg("t"), py::arg("beta"), py::arg("M"));
  m.def(
      "exhaustive_select",
      [](const std::vector<EigenMode>& modes, double t, int M, const std::string& criterion, double P,
         long budget) {
        ExhaustiveCriterion c = ExhaustiveCriterion::waterfilled_rate;
        if (criterion == "uniform_rate")
          c = ExhaustiveCriterion::uniform_rate;
        else if (criterion == "min_defect")
          c = ExhaustiveCriterion::min_defect;
        else if (criterion != "waterfilled_rate")
          throw std::invalid_argument("criterion must be waterfilled_rate|uniform_rate|min_defect");
        return exhaustive_select(preselect(modes, t), M, c, P, budget);
      },
      py::arg("modes"), py::arg("t"), py::arg("M"), py::arg("criterion") = "waterfilled_rate", py::arg("P") = 10.0,
      py::arg("budget") = 2'000'000);
  m.def(
      "random_select",
      [](const std::vector<EigenMode>& modes, int M, RngStream& s, std::optional<double> pool_threshold) {
        return random_select(modes, M, s, pool_threshold);
      },
      py::arg("modes"), py::arg("M"), py::arg("stream"), py::arg("pool_threshold") = std::nullopt);

  m.def(
      "sum_rate_of_selection",
      [](const SelectionResult& sel, double P, bool waterfilled) {
        return zf_sum_rate(coordinate_matrix(sel), P,
                           waterfilled ? PowerPolicy::waterfilled : PowerPolicy::uniform);
      },
      py::arg("selection"), py::arg("P"), py::arg("waterfilled") = true);
  m.def(
      "effective_noise_gammas_of",
      [](const SelectionResult& sel) { return effective_noise_gammas(coordinate_matrix(sel)); },
      py::arg("selection"));
  m.def(
      "zero_forcing_precode_of",
      [](const SelectionResult& sel, const Eigen::VectorXcd& u) {
        return zero_forcing_precode(coordinate_matrix(sel), u);
      },
      py::arg("selection"), py::arg("u"));
  m.def("waterfill_powers", &waterfill_powers, py::arg("gammas"), py::arg("P"));

  m.def(
      "dpc_sum_capacity",
      [](const std::vector<ChannelMatrix>& channels, double P) { return dpc_sum_capacity(channels, P).rate_nats; },
      py::arg("channels"), py::arg("P"));
  m.def("tdma_rate", &tdma_rate, py::arg("channels"), py::arg("P"));
  m.def(
      "random_dpc_rate",
      [](const std::vector<ChannelMatrix>& channels, int M_users, double P, RngStream& s) {
        return random_dpc_rate(channels, M_users, P, s).rate_nats;
      },
      py::arg("channels"), py::arg("M_users"), py::arg("P"), py::arg("stream"));
  m.def("no_csi_rate", &no_csi_rate, py::arg("channel"), py::arg("P"));
  m.def("single_user_capacity", &single_user_capacity, py::arg("channel"), py::arg("P"));
}
