#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "cvqelm/data.hpp"
#include "cvqelm/errors.hpp"
#include "cvqelm/harness.hpp"
#include "cvqelm/mlp.hpp"
#include "cvqelm/readout.hpp"
#include "cvqelm/substrate.hpp"
#include "cvqelm/verify.hpp"

namespace fs = std::filesystem;
using namespace cvqelm;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitVerification = 1;
constexpr int kExitUsage = 2;
constexpr int kExitData = 3;

fs::path data_dir() {
  if (const char* env = std::getenv("CVQELM_DATA_DIR")) return fs::path(env);
  return fs::path("data");
}

struct DataArgs {
  std::string kind;        // jets | higgs | synthetic | csv
  std::string file;        // overrides the data-directory default
  int synthetic_f = 2;
  double synthetic_delta = 2.0;
  int synthetic_n = 10000;
  std::uint64_t synthetic_seed = 1;

  void attach(CLI::App* cmd, bool with_kind_option = true) {
    if (with_kind_option) {
      cmd->add_option("--data", kind, "Dataset: jets | higgs | synthetic | csv")->required();
    }
    cmd->add_option("--data-file", file,
                    "Path to the dataset CSV (default: $CVQELM_DATA_DIR/<kind>.csv)");
    cmd->add_option("--synthetic-f", synthetic_f, "Synthetic: feature count");
    cmd->add_option("--synthetic-delta", synthetic_delta, "Synthetic: class separation");
    cmd->add_option("--synthetic-n", synthetic_n, "Synthetic: sample count");
    cmd->add_option("--synthetic-seed", synthetic_seed, "Synthetic: generator seed");
  }

  Dataset load() const {
    if (kind == "synthetic") {
      return synthetic_gaussians(synthetic_f, synthetic_delta, synthetic_n, synthetic_seed);
    }
    fs::path path = file.empty() ? data_dir() / (kind + ".csv") : fs::path(file);
    if (kind == "jets") return load_jets(path);
    if (kind == "higgs") return load_higgs(path);
    if (kind == "csv") return load_labeled_csv(path);
    throw InvalidArgument("unknown dataset kind: " + kind);
  }
};

std::vector<int> parse_sizes(const std::string& text) {
  std::vector<int> sizes;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) sizes.push_back(std::stoi(item));
  }
  return sizes;
}

std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> grid;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) grid.push_back(std::stod(item));
  }
  return grid;
}

int run(int argc, char** argv) {
  CLI::App app{"Continuous-variable photonic QELM simulator and benchmark harness"};
  app.require_subcommand(1);

  // --- substrate gen ------------------------------------------------------
  auto* substrate_cmd = app.add_subcommand("substrate", "Substrate configuration tools");
  substrate_cmd->require_subcommand(1);
  auto* gen = substrate_cmd->add_subcommand("gen", "Draw and save a random substrate");
  int gen_modes = 16;
  double gen_s_max = 1.0;
  double gen_scale = 1.0;
  std::uint64_t gen_seed = 0;
  std::string gen_scheme = "homodyne";
  std::string gen_out;
  gen->add_option("--modes", gen_modes, "Number of optical modes")->required();
  gen->add_option("--s-max", gen_s_max, "Half-range for the CX angles");
  gen->add_option("--seed", gen_seed, "Draw seed")->required();
  gen->add_option("--scheme", gen_scheme, "Measurement scheme: pnr | homodyne");
  gen->add_option("--encoding-scale", gen_scale, "Displacement per unit feature");
  gen->add_option("--out", gen_out, "Output JSON path")->required();
  gen->callback([&] {
    const SubstrateConfig cfg = draw_substrate(gen_modes, gen_s_max, gen_seed,
                                               scheme_from_string(gen_scheme), gen_scale);
    save_substrate(cfg, gen_out);
    std::cout << "substrate " << substrate_digest(cfg) << " -> " << gen_out << "\n";
  });

  // --- features -----------------------------------------------------------
  auto* features_cmd = app.add_subcommand("features", "Extract feature vectors for a dataset");
  DataArgs features_data;
  features_data.attach(features_cmd);
  std::string features_substrate;
  std::string features_out;
  bool features_raw = false;
  features_cmd->add_option("--substrate", features_substrate, "Substrate JSON")->required();
  features_cmd->add_option("--out", features_out, "Output CSV path")->required();
  features_cmd->add_flag("--no-standardize", features_raw,
                         "Encode raw inputs instead of z-scored ones");
  features_cmd->callback([&] {
    const Dataset dataset = features_data.load();
    const SubstrateConfig cfg = load_substrate(features_substrate);
    Mat x = dataset.x;
    if (!features_raw) x = standardize_apply(standardize_fit(x), x);
    const Mat phi = feature_matrix(x, cfg);
    std::ofstream out(features_out);
    if (!out) throw DataError("cannot write " + features_out);
    for (int j = 0; j < phi.cols(); ++j) out << "phi_" << j << ",";
    out << "label\n";
    char buf[32];
    for (Eigen::Index i = 0; i < phi.rows(); ++i) {
      for (Eigen::Index j = 0; j < phi.cols(); ++j) {
        std::snprintf(buf, sizeof(buf), "%.17g", phi(i, j));
        out << buf << ",";
      }
      out << dataset.y[i] << "\n";
    }
    std::cout << "wrote " << phi.rows() << " x " << phi.cols() << " features -> " << features_out
              << "\n";
  });

  // --- train (QELM readout) ------------------------------------------------
  auto* train_cmd = app.add_subcommand("train", "Train a linear readout on substrate features");
  DataArgs train_data;
  train_data.attach(train_cmd);
  std::string train_readout = "ridge";
  std::string train_substrate;
  std::string train_lambda_grid = "1e-4,1e-3,1e-2,1e-1";
  std::string train_out;
  std::string train_splits_out;
  std::uint64_t train_seed = 0;
  int train_cap = 0;
  train_cmd->add_option("--readout", train_readout, "ridge | logistic");
  train_cmd->add_option("--substrate", train_substrate, "Substrate JSON")->required();
  train_cmd->add_option("--lambda-grid", train_lambda_grid, "Comma-separated lambda grid");
  train_cmd->add_option("--seed", train_seed, "Split seed");
  train_cmd->add_option("--n-train", train_cap, "Cap on training rows (0 = no cap)");
  train_cmd->add_option("--out", train_out, "Output model JSON");
  train_cmd->add_option("--save-splits", train_splits_out, "Write the split index lists as JSON");
  train_cmd->callback([&] {
    const Dataset dataset = train_data.load();
    const SubstrateConfig substrate = load_substrate(train_substrate);
    SplitSpec spec;
    spec.seed = train_seed;
    if (train_cap > 0) spec.n_train_cap = train_cap;
    const SplitData data = split(dataset, spec);
    if (!train_splits_out.empty()) {
      std::ofstream out(train_splits_out);
      if (!out) throw DataError("cannot write " + train_splits_out);
      out << split_indices_to_json(data.indices) << "\n";
    }
    const Standardizer standardizer = standardize_fit(data.x_train);
    const Mat x_train = standardize_apply(standardizer, data.x_train);
    const Mat x_val = standardize_apply(standardizer, data.x_val);
    const Mat x_test = standardize_apply(standardizer, data.x_test);
    const Mat phi_train = feature_matrix(x_train, substrate);
    const Mat phi_val = feature_matrix(x_val, substrate);
    const Mat phi_test = feature_matrix(x_test, substrate);
    const Mat z_train = assemble_design(phi_train, x_train);

    ReadoutModel model;
    model.kind = readout_kind_from_string(train_readout);
    model.scheme = substrate.scheme;
    model.standardizer = standardizer;
    model.input_dim = dataset.features();
    model.feature_dim = feature_dim(substrate);
    double best_val = -1.0;
    for (double lambda : parse_grid(train_lambda_grid)) {
      Vec weights = model.kind == ReadoutKind::Ridge
                        ? ridge_fit(z_train, data.y_train, {lambda, true})
                        : logistic_fit(z_train, data.y_train, lambda);
      ReadoutModel candidate = model;
      candidate.lambda = lambda;
      candidate.weights = weights;
      const double acc = accuracy(predict_labels(candidate, phi_val, x_val), data.y_val);
      if (acc > best_val) {
        best_val = acc;
        model = candidate;
      }
    }
    const double test_acc = accuracy(predict_labels(model, phi_test, x_test), data.y_test);
    std::cout << "readout " << train_readout << "  lambda " << model.lambda << "  val "
              << best_val << "  test " << test_acc << "\n";
    if (!train_out.empty()) {
      save_readout(model, train_out);
      std::cout << "model -> " << train_out << "\n";
    }
  });

  // --- baseline mlp ---------------------------------------------------------
  auto* baseline_cmd = app.add_subcommand("baseline", "Classical baseline models");
  baseline_cmd->require_subcommand(1);
  auto* mlp_cmd = baseline_cmd->add_subcommand("mlp", "Single-hidden-layer MLP");
  DataArgs mlp_data;
  mlp_data.attach(mlp_cmd);
  int mlp_hidden = 2;
  std::uint64_t mlp_seed = 0;
  int mlp_cap = 0;
  std::string mlp_out;
  std::string mlp_splits_out;
  mlp_cmd->add_option("--hidden", mlp_hidden, "Hidden width H");
  mlp_cmd->add_option("--seed", mlp_seed, "Split and init seed");
  mlp_cmd->add_option("--n-train", mlp_cap, "Cap on training rows (0 = no cap)");
  mlp_cmd->add_option("--out", mlp_out, "Output model JSON");
  mlp_cmd->add_option("--save-splits", mlp_splits_out, "Write the split index lists as JSON");
  mlp_cmd->callback([&] {
    const Dataset dataset = mlp_data.load();
    SplitSpec spec;
    spec.seed = mlp_seed;
    if (mlp_cap > 0) spec.n_train_cap = mlp_cap;
    const SplitData data = split(dataset, spec);
    if (!mlp_splits_out.empty()) {
      std::ofstream out(mlp_splits_out);
      if (!out) throw DataError("cannot write " + mlp_splits_out);
      out << split_indices_to_json(data.indices) << "\n";
    }
    const Standardizer standardizer = standardize_fit(data.x_train);
    const Mat x_train = standardize_apply(standardizer, data.x_train);
    const Mat x_val = standardize_apply(standardizer, data.x_val);
    const Mat x_test = standardize_apply(standardizer, data.x_test);
    const MlpModel init = mlp_init(dataset.features(), mlp_hidden, mlp_seed);
    MlpTrainReport report;
    const MlpModel model = mlp_train(init, x_train, data.y_train, x_val, data.y_val,
                                     MlpTrainOptions{}, &report);
    const double test_acc = accuracy(mlp_predict(model, x_test), data.y_test);
    std::cout << "mlp H=" << mlp_hidden << " (" << mlp_param_count(model)
              << " parameters)  weight decay " << report.chosen_weight_decay << "  val "
              << report.best_val_accuracy << "  test " << test_acc << "\n";
    if (!mlp_out.empty()) {
      std::ofstream out(mlp_out);
      if (!out) throw DataError("cannot write " + mlp_out);
      out << mlp_to_json(model, &report) << "\n";
      std::cout << "model -> " << mlp_out << "\n";
    }
  });

  // --- sweep ----------------------------------------------------------------
  auto* sweep_cmd = app.add_subcommand("sweep", "Sample-size sweep over models");
  DataArgs sweep_data;
  sweep_data.attach(sweep_cmd);
  std::string sweep_models = "QELM-HOM-ridge,QELM-HOM-logistic,MLP-H2";
  std::string sweep_sizes = "1000,5000,10000";
  int sweep_repeats = 10;
  std::uint64_t sweep_seed = 0;
  std::string sweep_out = "results";
  int sweep_max_rows = 0;
  bool sweep_freeze = false;
  sweep_cmd->add_option("--models", sweep_models, "Comma-separated model ids");
  sweep_cmd->add_option("--sizes", sweep_sizes, "Comma-separated training sizes");
  sweep_cmd->add_option("--repeats", sweep_repeats, "Independent repeats per cell");
  sweep_cmd->add_option("--seed", sweep_seed, "Base seed");
  sweep_cmd->add_option("--out", sweep_out, "Output directory");
  sweep_cmd->add_option("--max-rows", sweep_max_rows,
                        "Subsample the dataset to this many rows (0 = all)");
  sweep_cmd->add_flag("--freeze-substrate", sweep_freeze,
                      "Keep one substrate across repeats instead of redrawing");
  sweep_cmd->callback([&] {
    Dataset dataset = sweep_data.load();
    if (sweep_max_rows > 0) dataset = subsample(dataset, sweep_max_rows, sweep_seed);
    std::vector<ModelId> models;
    std::stringstream ss(sweep_models);
    std::string item;
    while (std::getline(ss, item, ',')) {
      if (!item.empty()) models.push_back(model_id_from_string(item));
    }
    RunConfig config;
    config.freeze_substrate = sweep_freeze;
    const SweepResult result =
        sweep(dataset, models, parse_sizes(sweep_sizes), sweep_repeats, sweep_seed, config);
    emit_results(result, sweep_out);
    for (const SweepCell& cell : result.cells) {
      std::cout << cell.model << "  n=" << cell.n_train << "  mean " << cell.mean_accuracy;
      if (cell.std_accuracy) std::cout << "  std " << *cell.std_accuracy;
      std::cout << "  (" << cell.n_ok << "/" << cell.runs.size() << " ok)\n";
    }
    std::cout << "results -> " << sweep_out << "\n";
  });

  // --- plot -------------------------------------------------------------------
  auto* plot_cmd = app.add_subcommand("plot", "Re-render plots from results.json");
  std::string plot_results;
  std::string plot_out = "results";
  plot_cmd->add_option("--results", plot_results, "Path to results.json")->required();
  plot_cmd->add_option("--out", plot_out, "Output directory");
  plot_cmd->callback([&] {
    const SweepResult result = load_results(plot_results);
    emit_results(result, plot_out);
    std::cout << "plots -> " << plot_out << "\n";
  });

  // --- verify -------------------------------------------------------------------
  auto* verify_cmd = app.add_subcommand("verify", "Run the oracle and invariant suites");
  verify_cmd->callback([&] {
    const std::vector<CheckResult> results = run_verification();
    std::cout << format_report(results);
    if (!all_passed(results)) throw StateError("verification failed");
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return kExitUsage;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const InvalidArgument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const SchemaError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitVerification;
  }
}
