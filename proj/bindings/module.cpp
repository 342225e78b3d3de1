#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "cvqelm/data.hpp"
#include "cvqelm/errors.hpp"
#include "cvqelm/fock.hpp"
#include "cvqelm/gaussian.hpp"
#include "cvqelm/harness.hpp"
#include "cvqelm/mlp.hpp"
#include "cvqelm/readout.hpp"
#include "cvqelm/substrate.hpp"
#include "cvqelm/verify.hpp"

namespace py = pybind11;
using namespace cvqelm;

PYBIND11_MODULE(_core, m) {
  m.doc() = "Continuous-variable photonic QELM simulator";

  py::register_exception<InvalidArgument>(m, "InvalidArgumentError", PyExc_ValueError);
  py::register_exception<DataError>(m, "DataError", PyExc_RuntimeError);
  py::register_exception<StateError>(m, "StateError", PyExc_RuntimeError);
  py::register_exception<CutoffError>(m, "CutoffError", PyExc_RuntimeError);

  // --- gaussian core ---------------------------------------------------
  py::class_<GaussianState>(m, "GaussianState")
      .def(py::init<>())
      .def_readwrite("mean", &GaussianState::mean)
      .def_readwrite("cov", &GaussianState::cov)
      .def_property_readonly("modes", &GaussianState::modes);

  py::class_<GateOp>(m, "GateOp")
      .def(py::init<>())
      .def_readwrite("symplectic", &GateOp::symplectic)
      .def_readwrite("shift", &GateOp::shift)
      .def_property_readonly("modes", &GateOp::modes);

  m.def("vacuum_state", &vacuum_state, py::arg("modes"));
  m.def("identity_gate", &identity_gate, py::arg("modes"));
  m.def("displacement_gate", &displacement_gate, py::arg("modes"), py::arg("mode"),
        py::arg("alpha_re"), py::arg("alpha_im") = 0.0);
  m.def("squeeze_gate", &squeeze_gate, py::arg("modes"), py::arg("mode"), py::arg("r"));
  m.def("beamsplitter_gate", &beamsplitter_gate, py::arg("modes"), py::arg("mode_a"),
        py::arg("mode_b"), py::arg("theta"), py::arg("phi") = 0.0);
  m.def("cx_gate", &cx_gate, py::arg("modes"), py::arg("control"), py::arg("target"),
        py::arg("s"));
  m.def("cx_gate_decomposed", &cx_gate_decomposed, py::arg("modes"), py::arg("control"),
        py::arg("target"), py::arg("s"));
  m.def(
      "cx_decomposition_params",
      [](double s) {
        const CxDecompositionParams p = cx_decomposition_params(s);
        return py::make_tuple(p.r, p.theta);
      },
      py::arg("s"), "Returns (r, theta) with sinh r = -s/2 and cos(2 theta) = -tanh r.");
  m.def("compose", &compose, py::arg("first"), py::arg("later"));
  m.def("apply", &apply, py::arg("state"), py::arg("gate"));
  m.def("mode_marginal", &mode_marginal, py::arg("state"), py::arg("mode"));
  m.def("symplectic_form", &symplectic_form, py::arg("modes"));
  m.def("symplectic_defect", &symplectic_defect, py::arg("symplectic"));
  m.def("physicality_min_eigenvalue", &physicality_min_eigenvalue, py::arg("state"));
  m.def("purity_determinant", &purity_determinant, py::arg("state"));

  // --- substrate ----------------------------------------------------------
  py::enum_<Scheme>(m, "Scheme").value("PNR", Scheme::Pnr).value("HOMODYNE", Scheme::Homodyne);

  py::class_<SubstrateConfig>(m, "SubstrateConfig")
      .def(py::init<>())
      .def_readwrite("modes", &SubstrateConfig::modes)
      .def_readwrite("thetas", &SubstrateConfig::thetas)
      .def_readwrite("s_max", &SubstrateConfig::s_max)
      .def_readwrite("encoding_scale", &SubstrateConfig::encoding_scale)
      .def_readwrite("seed", &SubstrateConfig::seed)
      .def_readwrite("scheme", &SubstrateConfig::scheme);

  py::class_<FeatureVector>(m, "FeatureVector")
      .def_readonly("values", &FeatureVector::values)
      .def_readonly("scheme", &FeatureVector::scheme);

  m.def("draw_substrate", &draw_substrate, py::arg("modes"), py::arg("s_max"), py::arg("seed"),
        py::arg("scheme") = Scheme::Homodyne, py::arg("encoding_scale") = 1.0);
  m.def("feature_dim", py::overload_cast<const SubstrateConfig&>(&feature_dim));
  m.def("forward", &forward, py::arg("x"), py::arg("config"));
  m.def("pnr_features", &pnr_features, py::arg("state"));
  m.def("homodyne_features", &homodyne_features, py::arg("state"));
  m.def("feature_matrix", &feature_matrix, py::arg("x"), py::arg("config"));
  m.def("substrate_to_json", &substrate_to_json);
  m.def("substrate_from_json", &substrate_from_json);
  m.def("save_substrate", &save_substrate, py::arg("config"), py::arg("path"));
  m.def("load_substrate", &load_substrate, py::arg("path"));
  m.def("substrate_digest", &substrate_digest);

  // --- fock oracle ------------------------------------------------------
  py::class_<FockState>(m, "FockState")
      .def_readonly("modes", &FockState::modes)
      .def_readonly("cutoff", &FockState::cutoff)
      .def_readonly("amplitudes", &FockState::amplitudes)
      .def("norm", &FockState::norm)
      .def("tail_mass", &FockState::tail_mass);

  py::class_<ModeMoments>(m, "ModeMoments")
      .def_readonly("nbar", &ModeMoments::nbar)
      .def_readonly("var_n", &ModeMoments::var_n)
      .def_readonly("x", &ModeMoments::x)
      .def_readonly("p", &ModeMoments::p)
      .def_readonly("xx", &ModeMoments::xx)
      .def_readonly("pp", &ModeMoments::pp)
      .def_readonly("xp", &ModeMoments::xp);

  m.def("fock_simulate", &simulate, py::arg("x"), py::arg("config"), py::arg("cutoff") = 40);
  m.def("oracle_moments", &oracle_moments, py::arg("state"));

  // --- readout ---------------------------------------------------------
  py::class_<Standardizer>(m, "Standardizer")
      .def(py::init<>())
      .def_readwrite("means", &Standardizer::means)
      .def_readwrite("stds", &Standardizer::stds);

  py::enum_<ReadoutKind>(m, "ReadoutKind")
      .value("RIDGE", ReadoutKind::Ridge)
      .value("LOGISTIC", ReadoutKind::Logistic);

  py::class_<LogisticReport>(m, "LogisticReport")
      .def_readonly("iterations", &LogisticReport::iterations)
      .def_readonly("gradient_norm", &LogisticReport::gradient_norm)
      .def_readonly("converged", &LogisticReport::converged)
      .def_readonly("objective", &LogisticReport::objective);

  py::class_<ReadoutModel>(m, "ReadoutModel")
      .def(py::init<>())
      .def_readwrite("kind", &ReadoutModel::kind)
      .def_readwrite("lambda_", &ReadoutModel::lambda)
      .def_readwrite("scheme", &ReadoutModel::scheme)
      .def_readwrite("weights", &ReadoutModel::weights)
      .def_readwrite("standardizer", &ReadoutModel::standardizer)
      .def_readwrite("input_dim", &ReadoutModel::input_dim)
      .def_readwrite("feature_dim", &ReadoutModel::feature_dim);

  m.def("standardize_fit", &standardize_fit, py::arg("x_train"));
  m.def("standardize_apply", &standardize_apply, py::arg("standardizer"), py::arg("x"));
  m.def("assemble_design", &assemble_design, py::arg("phi"), py::arg("x"));
  m.def(
      "ridge_fit",
      [](const Mat& z, const std::vector<int>& y, double lambda, bool penalize_bias) {
        return ridge_fit(z, y, {lambda, penalize_bias});
      },
      py::arg("z"), py::arg("labels"), py::arg("lambda_") = 1e-3,
      py::arg("penalize_bias") = true);
  m.def(
      "logistic_fit",
      [](const Mat& z, const std::vector<int>& y, double lambda, double tol, int max_iter) {
        LogisticReport report;
        Vec eta = logistic_fit(z, y, lambda, tol, max_iter, &report);
        return py::make_tuple(eta, report);
      },
      py::arg("z"), py::arg("labels"), py::arg("lambda_") = 1e-3, py::arg("tol") = 1e-8,
      py::arg("max_iter") = 100);
  m.def("predict", &predict, py::arg("model"), py::arg("phi_row"), py::arg("x_row"));
  m.def("predict_labels", &predict_labels, py::arg("model"), py::arg("phi"), py::arg("x"));
  m.def("accuracy", &accuracy, py::arg("predicted"), py::arg("truth"));
  m.def("readout_to_json", &readout_to_json);
  m.def("readout_from_json", &readout_from_json);

  // --- mlp baseline -------------------------------------------------------
  py::class_<MlpModel>(m, "MlpModel")
      .def(py::init<>())
      .def_readwrite("w1", &MlpModel::w1)
      .def_readwrite("b1", &MlpModel::b1)
      .def_readwrite("w2", &MlpModel::w2)
      .def_readwrite("b2", &MlpModel::b2)
      .def_property_readonly("input_dim", &MlpModel::input_dim)
      .def_property_readonly("hidden_dim", &MlpModel::hidden_dim);

  py::class_<MlpTrainOptions>(m, "MlpTrainOptions")
      .def(py::init<>())
      .def_readwrite("weight_decay_grid", &MlpTrainOptions::weight_decay_grid)
      .def_readwrite("step", &MlpTrainOptions::step)
      .def_readwrite("max_epochs", &MlpTrainOptions::max_epochs)
      .def_readwrite("patience", &MlpTrainOptions::patience)
      .def_readwrite("batch_size", &MlpTrainOptions::batch_size)
      .def_readwrite("full_batch_threshold", &MlpTrainOptions::full_batch_threshold);

  py::class_<MlpTrainReport>(m, "MlpTrainReport")
      .def_readonly("trained", &MlpTrainReport::trained)
      .def_readonly("chosen_weight_decay", &MlpTrainReport::chosen_weight_decay)
      .def_readonly("best_val_accuracy", &MlpTrainReport::best_val_accuracy)
      .def_readonly("epochs_run", &MlpTrainReport::epochs_run)
      .def_readonly("train_losses", &MlpTrainReport::train_losses);

  m.def("mlp_param_count", py::overload_cast<int, int>(&mlp_param_count), py::arg("input_dim"),
        py::arg("hidden_dim"));
  m.def("mlp_init", &mlp_init, py::arg("input_dim"), py::arg("hidden_dim"), py::arg("seed"));
  m.def(
      "mlp_train",
      [](const MlpModel& init, const Mat& xt, const std::vector<int>& yt, const Mat& xv,
         const std::vector<int>& yv, const MlpTrainOptions& opts) {
        MlpTrainReport report;
        MlpModel model = mlp_train(init, xt, yt, xv, yv, opts, &report);
        return py::make_tuple(model, report);
      },
      py::arg("init"), py::arg("x_train"), py::arg("y_train"), py::arg("x_val"),
      py::arg("y_val"), py::arg("options") = MlpTrainOptions{});
  m.def("mlp_logits", &mlp_logits, py::arg("model"), py::arg("x"));
  m.def("mlp_predict", &mlp_predict, py::arg("model"), py::arg("x"));

  // --- data ----------------------------------------------------------------
  py::enum_<DataSource>(m, "DataSource")
      .value("JETS", DataSource::Jets)
      .value("HIGGS", DataSource::Higgs)
      .value("SYNTHETIC", DataSource::Synthetic);

  py::class_<Dataset>(m, "Dataset")
      .def_readonly("x", &Dataset::x)
      .def_readonly("y", &Dataset::y)
      .def_readonly("feature_names", &Dataset::feature_names)
      .def_readonly("source", &Dataset::source)
      .def_property_readonly("n", &Dataset::n)
      .def_property_readonly("features", &Dataset::features);

  py::class_<SplitSpec>(m, "SplitSpec")
      .def(py::init<>())
      .def_readwrite("train_fraction", &SplitSpec::train_fraction)
      .def_readwrite("val_fraction", &SplitSpec::val_fraction)
      .def_readwrite("test_fraction", &SplitSpec::test_fraction)
      .def_readwrite("seed", &SplitSpec::seed)
      .def_readwrite("n_train_cap", &SplitSpec::n_train_cap);

  py::class_<SplitData>(m, "SplitData")
      .def_readonly("x_train", &SplitData::x_train)
      .def_readonly("x_val", &SplitData::x_val)
      .def_readonly("x_test", &SplitData::x_test)
      .def_readonly("y_train", &SplitData::y_train)
      .def_readonly("y_val", &SplitData::y_val)
      .def_readonly("y_test", &SplitData::y_test);

  m.def("load_jets", [](const std::filesystem::path& p) { return load_jets(p); }, py::arg("path"));
  m.def("load_higgs", [](const std::filesystem::path& p) { return load_higgs(p); },
        py::arg("path"));
  m.def("load_labeled_csv", &load_labeled_csv, py::arg("path"));
  m.def("synthetic_gaussians", &synthetic_gaussians, py::arg("features"), py::arg("delta"),
        py::arg("n"), py::arg("seed"));
  m.def("subsample", &subsample, py::arg("dataset"), py::arg("n"), py::arg("seed"));
  m.def("split", &split, py::arg("dataset"), py::arg("spec"));

  // --- harness -----------------------------------------------------------
  py::enum_<ModelId>(m, "ModelId")
      .value("QELM_PNR_RIDGE", ModelId::QelmPnrRidge)
      .value("QELM_PNR_LOGISTIC", ModelId::QelmPnrLogistic)
      .value("QELM_HOM_RIDGE", ModelId::QelmHomRidge)
      .value("QELM_HOM_LOGISTIC", ModelId::QelmHomLogistic)
      .value("MLP_H2", ModelId::MlpH2)
      .value("MLP_H10", ModelId::MlpH10);

  py::class_<RunConfig>(m, "RunConfig")
      .def(py::init<>())
      .def_readwrite("s_max", &RunConfig::s_max)
      .def_readwrite("encoding_scale", &RunConfig::encoding_scale)
      .def_readwrite("lambda_grid", &RunConfig::lambda_grid)
      .def_readwrite("standardize", &RunConfig::standardize)
      .def_readwrite("freeze_substrate", &RunConfig::freeze_substrate)
      .def_readwrite("mlp", &RunConfig::mlp);

  py::class_<RunRecord>(m, "RunRecord")
      .def_readonly("model", &RunRecord::model)
      .def_readonly("n_train", &RunRecord::n_train)
      .def_readonly("seed", &RunRecord::seed)
      .def_readonly("split_seed", &RunRecord::split_seed)
      .def_readonly("substrate_digest", &RunRecord::substrate_digest)
      .def_readonly("test_accuracy", &RunRecord::test_accuracy)
      .def_readonly("val_accuracy", &RunRecord::val_accuracy)
      .def_readonly("chosen_regularization", &RunRecord::chosen_regularization)
      .def_readonly("wall_time_s", &RunRecord::wall_time_s)
      .def_readonly("ok", &RunRecord::ok)
      .def_readonly("error", &RunRecord::error);

  py::class_<SweepCell>(m, "SweepCell")
      .def_readonly("model", &SweepCell::model)
      .def_readonly("n_train", &SweepCell::n_train)
      .def_readonly("runs", &SweepCell::runs)
      .def_readonly("n_ok", &SweepCell::n_ok)
      .def_readonly("mean_accuracy", &SweepCell::mean_accuracy)
      .def_readonly("std_accuracy", &SweepCell::std_accuracy);

  py::class_<SweepResult>(m, "SweepResult")
      .def_readonly("cells", &SweepResult::cells)
      .def_readonly("base_seed", &SweepResult::base_seed)
      .def_readonly("dataset_digest", &SweepResult::dataset_digest)
      .def_readonly("config_digest", &SweepResult::config_digest);

  m.def("model_id_from_string", &model_id_from_string);
  m.def("model_id_to_string", [](ModelId id) { return to_string(id); });
  m.def("run_single", &run_single, py::arg("dataset"), py::arg("model"), py::arg("n_train"),
        py::arg("split_seed"), py::arg("model_seed"), py::arg("config") = RunConfig{});
  m.def("sweep", &sweep, py::arg("dataset"), py::arg("models"), py::arg("sizes"),
        py::arg("n_repeats"), py::arg("base_seed"), py::arg("config") = RunConfig{});
  m.def("emit_results", &emit_results, py::arg("result"), py::arg("out_dir"));
  m.def("load_results", &load_results, py::arg("path"));
  m.def("sweep_to_json", &sweep_to_json);
  m.def("sweep_from_json", &sweep_from_json);

  // --- verification ---------------------------------------------------------
  py::class_<CheckResult>(m, "CheckResult")
      .def_readonly("name", &CheckResult::name)
      .def_readonly("pass_", &CheckResult::pass)
      .def_readonly("deviation", &CheckResult::deviation)
      .def_readonly("tolerance", &CheckResult::tolerance)
      .def_readonly("detail", &CheckResult::detail);

  m.def("run_verification", [] { return run_verification(); });
  m.def("verification_report", [] { return format_report(run_verification()); });

#ifdef CVQELM_VERSION
  m.attr("__version__") = CVQELM_VERSION;
#else
  m.attr("__version__") = "dev";
#endif
}
