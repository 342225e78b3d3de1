#include "cvqelm/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "cvqelm/errors.hpp"
#include "cvqelm/rng.hpp"

namespace cvqelm {

using json = nlohmann::ordered_json;

std::string to_string(ModelId id) {
  switch (id) {
    case ModelId::QelmPnrRidge: return "QELM-PNR-ridge";
    case ModelId::QelmPnrLogistic: return "QELM-PNR-logistic";
    case ModelId::QelmHomRidge: return "QELM-HOM-ridge";
    case ModelId::QelmHomLogistic: return "QELM-HOM-logistic";
    case ModelId::MlpH2: return "MLP-H2";
    case ModelId::MlpH10: return "MLP-H10";
  }
  return "unknown";
}

ModelId model_id_from_string(const std::string& name) {
  for (ModelId id : {ModelId::QelmPnrRidge, ModelId::QelmPnrLogistic, ModelId::QelmHomRidge,
                     ModelId::QelmHomLogistic, ModelId::MlpH2, ModelId::MlpH10}) {
    if (to_string(id) == name) return id;
  }
  throw InvalidArgument("unknown model id: " + name);
}

bool is_qelm(ModelId id) { return id != ModelId::MlpH2 && id != ModelId::MlpH10; }

namespace {

Scheme model_scheme(ModelId id) {
  return (id == ModelId::QelmPnrRidge || id == ModelId::QelmPnrLogistic) ? Scheme::Pnr
                                                                         : Scheme::Homodyne;
}

ReadoutKind model_readout(ModelId id) {
  return (id == ModelId::QelmPnrRidge || id == ModelId::QelmHomRidge) ? ReadoutKind::Ridge
                                                                      : ReadoutKind::Logistic;
}

int model_hidden(ModelId id) { return id == ModelId::MlpH2 ? 2 : 10; }

std::string hex64(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace

std::string RunConfig::digest() const {
  json j;
  j["s_max"] = s_max;
  j["encoding_scale"] = encoding_scale;
  j["lambda_grid"] = lambda_grid;
  j["standardize"] = standardize;
  j["penalize_bias"] = penalize_bias;
  j["freeze_substrate"] = freeze_substrate;
  j["mlp"] = {{"weight_decay_grid", mlp.weight_decay_grid},
              {"step", mlp.step},
              {"max_epochs", mlp.max_epochs},
              {"patience", mlp.patience},
              {"batch_size", mlp.batch_size},
              {"full_batch_threshold", mlp.full_batch_threshold}};
  j["fractions"] = {fractions.train_fraction, fractions.val_fraction, fractions.test_fraction};
  return hex64(fnv1a(j.dump()));
}

std::uint64_t derive_split_seed(std::uint64_t base_seed, int size, int repeat) {
  std::uint64_t h = fnv1a("split");
  h = fnv1a(std::to_string(base_seed), h);
  h = fnv1a(std::to_string(size), h);
  h = fnv1a(std::to_string(repeat), h);
  return h;
}

std::uint64_t derive_model_seed(std::uint64_t base_seed, ModelId model, int size, int repeat) {
  std::uint64_t h = fnv1a("model");
  h = fnv1a(std::to_string(base_seed), h);
  h = fnv1a(to_string(model), h);
  h = fnv1a(std::to_string(size), h);
  h = fnv1a(std::to_string(repeat), h);
  return h;
}

RunRecord run_single(const Dataset& dataset, ModelId model, int n_train,
                     std::uint64_t split_seed, std::uint64_t model_seed, const RunConfig& config) {
  if (n_train < 1) throw InvalidArgument("run_single: n_train must be >= 1");
  const auto t0 = std::chrono::steady_clock::now();

  RunRecord rec;
  rec.model = to_string(model);
  rec.n_train = n_train;
  rec.seed = model_seed;
  rec.split_seed = split_seed;
  rec.config_digest = config.digest();

  SplitSpec spec = config.fractions;
  spec.seed = split_seed;
  spec.n_train_cap = n_train;
  const SplitData data = split(dataset, spec);

  Mat x_train = data.x_train;
  Mat x_val = data.x_val;
  Mat x_test = data.x_test;
  Standardizer standardizer;
  if (config.standardize) {
    standardizer = standardize_fit(x_train);
    x_train = standardize_apply(standardizer, x_train);
    x_val = standardize_apply(standardizer, x_val);
    x_test = standardize_apply(standardizer, x_test);
  }

  if (is_qelm(model)) {
    const SubstrateConfig substrate = draw_substrate(
        dataset.features(), config.s_max, model_seed, model_scheme(model), config.encoding_scale);
    rec.substrate_digest = cvqelm::substrate_digest(substrate);

    const Mat phi_train = feature_matrix(x_train, substrate);
    const Mat phi_val = feature_matrix(x_val, substrate);
    const Mat phi_test = feature_matrix(x_test, substrate);
    const Mat z_train = assemble_design(phi_train, x_train);

    ReadoutModel readout;
    readout.kind = model_readout(model);
    readout.scheme = substrate.scheme;
    readout.standardizer = standardizer;
    readout.input_dim = dataset.features();
    readout.feature_dim = feature_dim(substrate);

    double best_val = -1.0;
    for (double lambda : config.lambda_grid) {
      Vec weights;
      if (readout.kind == ReadoutKind::Ridge) {
        weights = ridge_fit(z_train, data.y_train, {lambda, config.penalize_bias});
      } else {
        weights = logistic_fit(z_train, data.y_train, lambda);
      }
      ReadoutModel candidate = readout;
      candidate.lambda = lambda;
      candidate.weights = weights;
      const double val_acc = accuracy(predict_labels(candidate, phi_val, x_val), data.y_val);
      if (val_acc > best_val) {  // ties keep the smaller lambda (grid is ascending)
        best_val = val_acc;
        readout = candidate;
      }
    }
    rec.val_accuracy = best_val;
    rec.chosen_regularization = readout.lambda;
    rec.test_accuracy = accuracy(predict_labels(readout, phi_test, x_test), data.y_test);
  } else {
    const MlpModel init = mlp_init(dataset.features(), model_hidden(model), model_seed);
    MlpTrainReport report;
    const MlpModel trained =
        mlp_train(init, x_train, data.y_train, x_val, data.y_val, config.mlp, &report);
    rec.val_accuracy = report.best_val_accuracy;
    rec.chosen_regularization = report.chosen_weight_decay;
    std::vector<int> pred = mlp_predict(trained, x_test);
    rec.test_accuracy = accuracy(pred, data.y_test);
  }

  rec.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rec;
}

SweepResult sweep(const Dataset& dataset, const std::vector<ModelId>& models,
                  const std::vector<int>& sizes, int n_repeats, std::uint64_t base_seed,
                  const RunConfig& config) {
  if (models.empty()) throw InvalidArgument("sweep: no models");
  if (n_repeats < 1) throw InvalidArgument("sweep: n_repeats must be >= 1");
  if (!std::is_sorted(sizes.begin(), sizes.end())) {
    throw InvalidArgument("sweep: sizes must be ascending");
  }

  SweepResult result;
  result.base_seed = base_seed;
  result.dataset_digest = dataset_digest(dataset);
  result.config_digest = config.digest();

  for (ModelId model : models) {
    for (int size : sizes) {
      SweepCell cell;
      cell.model = to_string(model);
      cell.n_train = size;
      for (int repeat = 0; repeat < n_repeats; ++repeat) {
        const std::uint64_t split_seed = derive_split_seed(base_seed, size, repeat);
        std::uint64_t model_seed = derive_model_seed(base_seed, model, size, repeat);
        if (config.freeze_substrate && is_qelm(model)) {
          model_seed = derive_model_seed(base_seed, model, size, 0);
        }
        try {
          cell.runs.push_back(run_single(dataset, model, size, split_seed, model_seed, config));
        } catch (const std::exception& e) {
          RunRecord failed;
          failed.model = to_string(model);
          failed.n_train = size;
          failed.seed = model_seed;
          failed.split_seed = split_seed;
          failed.config_digest = config.digest();
          failed.ok = false;
          failed.error = e.what();
          cell.runs.push_back(std::move(failed));
        }
      }
      double sum = 0.0;
      for (const RunRecord& r : cell.runs) {
        if (!r.ok) continue;
        sum += r.test_accuracy;
        ++cell.n_ok;
      }
      cell.mean_accuracy = cell.n_ok > 0 ? sum / cell.n_ok : 0.0;
      if (cell.n_ok >= 2) {
        double ss = 0.0;
        for (const RunRecord& r : cell.runs) {
          if (r.ok) ss += (r.test_accuracy - cell.mean_accuracy) * (r.test_accuracy - cell.mean_accuracy);
        }
        cell.std_accuracy = std::sqrt(ss / (cell.n_ok - 1));
      }
      result.cells.push_back(std::move(cell));
    }
  }
  return result;
}

namespace {

json record_to_json(const RunRecord& r) {
  json j;
  j["model"] = r.model;
  j["n_train"] = r.n_train;
  j["seed"] = r.seed;
  j["split_seed"] = r.split_seed;
  j["substrate_digest"] = r.substrate_digest;
  j["test_accuracy"] = r.test_accuracy;
  j["val_accuracy"] = r.val_accuracy;
  j["chosen_regularization"] = r.chosen_regularization;
  j["wall_time_s"] = r.wall_time_s;
  j["config_digest"] = r.config_digest;
  j["ok"] = r.ok;
  j["error"] = r.error;
  return j;
}

RunRecord record_from_json(const json& j) {
  RunRecord r;
  r.model = j.at("model").get<std::string>();
  r.n_train = j.at("n_train").get<int>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.split_seed = j.at("split_seed").get<std::uint64_t>();
  r.substrate_digest = j.at("substrate_digest").get<std::string>();
  r.test_accuracy = j.at("test_accuracy").get<double>();
  r.val_accuracy = j.at("val_accuracy").get<double>();
  r.chosen_regularization = j.at("chosen_regularization").get<double>();
  r.wall_time_s = j.at("wall_time_s").get<double>();
  r.config_digest = j.at("config_digest").get<std::string>();
  r.ok = j.at("ok").get<bool>();
  r.error = j.at("error").get<std::string>();
  return r;
}

}  // namespace

std::string sweep_to_json(const SweepResult& result) {
  json j;
  j["base_seed"] = result.base_seed;
  j["dataset_digest"] = result.dataset_digest;
  j["config_digest"] = result.config_digest;
  j["cells"] = json::array();
  for (const SweepCell& cell : result.cells) {
    json c;
    c["model"] = cell.model;
    c["n_train"] = cell.n_train;
    c["n_ok"] = cell.n_ok;
    c["mean_accuracy"] = cell.mean_accuracy;
    if (cell.std_accuracy) {
      c["std_accuracy"] = *cell.std_accuracy;
    } else {
      c["std_accuracy"] = nullptr;
    }
    c["runs"] = json::array();
    for (const RunRecord& r : cell.runs) c["runs"].push_back(record_to_json(r));
    j["cells"].push_back(std::move(c));
  }
  return j.dump(2);
}

SweepResult sweep_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw SchemaError(std::string("results JSON parse error: ") + e.what());
  }
  SweepResult result;
  try {
    result.base_seed = j.at("base_seed").get<std::uint64_t>();
    result.dataset_digest = j.at("dataset_digest").get<std::string>();
    result.config_digest = j.at("config_digest").get<std::string>();
    for (const json& c : j.at("cells")) {
      SweepCell cell;
      cell.model = c.at("model").get<std::string>();
      cell.n_train = c.at("n_train").get<int>();
      cell.n_ok = c.at("n_ok").get<int>();
      cell.mean_accuracy = c.at("mean_accuracy").get<double>();
      if (!c.at("std_accuracy").is_null()) cell.std_accuracy = c.at("std_accuracy").get<double>();
      for (const json& r : c.at("runs")) cell.runs.push_back(record_from_json(r));
      result.cells.push_back(std::move(cell));
    }
  } catch (const json::exception& e) {
    throw SchemaError(std::string("results JSON missing field: ") + e.what());
  }
  return result;
}

SweepResult load_results(const std::filesystem::path& results_json) {
  std::ifstream in(results_json);
  if (!in) throw DataError("cannot open " + results_json.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return sweep_from_json(ss.str());
}

bool sweep_equal(const SweepResult& a, const SweepResult& b) {
  if (a.base_seed != b.base_seed || a.dataset_digest != b.dataset_digest ||
      a.config_digest != b.config_digest || a.cells.size() != b.cells.size()) {
    return false;
  }
  for (std::size_t i = 0; i < a.cells.size(); ++i) {
    const SweepCell& ca = a.cells[i];
    const SweepCell& cb = b.cells[i];
    if (ca.model != cb.model || ca.n_train != cb.n_train || ca.n_ok != cb.n_ok ||
        ca.mean_accuracy != cb.mean_accuracy || ca.std_accuracy != cb.std_accuracy ||
        ca.runs.size() != cb.runs.size()) {
      return false;
    }
    for (std::size_t k = 0; k < ca.runs.size(); ++k) {
      const RunRecord& ra = ca.runs[k];
      const RunRecord& rb = cb.runs[k];
      if (ra.model != rb.model || ra.n_train != rb.n_train || ra.seed != rb.seed ||
          ra.split_seed != rb.split_seed || ra.substrate_digest != rb.substrate_digest ||
          ra.test_accuracy != rb.test_accuracy || ra.val_accuracy != rb.val_accuracy ||
          ra.chosen_regularization != rb.chosen_regularization ||
          ra.config_digest != rb.config_digest || ra.ok != rb.ok || ra.error != rb.error) {
        return false;
      }
    }
  }
  return true;
}

void emit_results(const SweepResult& result, const std::filesystem::path& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  {
    std::ofstream out(out_dir / "results.json");
    if (!out) throw DataError("cannot write " + (out_dir / "results.json").string());
    out << sweep_to_json(result) << "\n";
  }
  {
    std::ofstream out(out_dir / "summary.csv");
    if (!out) throw DataError("cannot write " + (out_dir / "summary.csv").string());
    out << "model,n_train,mean_accuracy,std_accuracy\n";
    char line[160];
    for (const SweepCell& cell : result.cells) {
      if (cell.std_accuracy) {
        std::snprintf(line, sizeof(line), "%s,%d,%.17g,%.17g\n", cell.model.c_str(), cell.n_train,
                      cell.mean_accuracy, *cell.std_accuracy);
      } else {
        std::snprintf(line, sizeof(line), "%s,%d,%.17g,\n", cell.model.c_str(), cell.n_train,
                      cell.mean_accuracy);
      }
      out << line;
    }
  }
  {
    std::ofstream out(out_dir / "accuracy_vs_size.svg");
    if (!out) throw DataError("cannot write accuracy_vs_size.svg");
    out << accuracy_vs_size_svg(result);
  }
  {
    std::ofstream out(out_dir / "accuracy_distributions.svg");
    if (!out) throw DataError("cannot write accuracy_distributions.svg");
    out << accuracy_distribution_svg(result);
  }
}

}  // namespace cvqelm
