#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "cvqelm/data.hpp"
#include "cvqelm/mlp.hpp"
#include "cvqelm/readout.hpp"
#include "cvqelm/substrate.hpp"

namespace cvqelm {

// Experiment orchestration: deterministic single runs, sample-size sweeps
// with repeated seeds, aggregation, and machine-readable outputs.

enum class ModelId {
  QelmPnrRidge,
  QelmPnrLogistic,
  QelmHomRidge,
  QelmHomLogistic,
  MlpH2,
  MlpH10,
};

std::string to_string(ModelId id);
ModelId model_id_from_string(const std::string& name);
bool is_qelm(ModelId id);

struct RunConfig {
  double s_max = 1.0;
  double encoding_scale = 1.0;
  std::vector<double> lambda_grid = {1e-4, 1e-3, 1e-2, 1e-1};
  bool standardize = true;
  bool penalize_bias = true;
  bool freeze_substrate = false;  // keep one substrate across repeats
  MlpTrainOptions mlp;
  SplitSpec fractions;  // seed and cap are filled in per run
  std::string digest() const;
};

struct RunRecord {
  std::string model;
  int n_train = 0;
  std::uint64_t seed = 0;        // model randomness (substrate draw / MLP init)
  std::uint64_t split_seed = 0;  // shared across models at fixed (size, repeat)
  std::string substrate_digest;  // empty for MLP runs
  double test_accuracy = 0.0;
  double val_accuracy = 0.0;
  double chosen_regularization = 0.0;  // lambda or weight decay
  double wall_time_s = 0.0;
  std::string config_digest;
  bool ok = true;
  std::string error;
};

/// One deterministic end-to-end run: split/cap/standardize, then either the
/// QELM pipeline (draw substrate, features, readout fit with lambda selected
/// on validation) or the MLP baseline.
RunRecord run_single(const Dataset& dataset, ModelId model, int n_train,
                     std::uint64_t split_seed, std::uint64_t model_seed, const RunConfig& config);

struct SweepCell {
  std::string model;
  int n_train = 0;
  std::vector<RunRecord> runs;
  int n_ok = 0;
  double mean_accuracy = 0.0;
  std::optional<double> std_accuracy;  // reported only when n_ok >= 2
};

struct SweepResult {
  std::vector<SweepCell> cells;  // ordered by (model, size)
  std::uint64_t base_seed = 0;
  std::string dataset_digest;
  std::string config_digest;
};

/// Stable seed derivation; the split stream depends only on (base, size,
/// repeat) so every model sees identical splits.
std::uint64_t derive_split_seed(std::uint64_t base_seed, int size, int repeat);
std::uint64_t derive_model_seed(std::uint64_t base_seed, ModelId model, int size, int repeat);

/// Run every (model, size, repeat); per-run failures are recorded and the
/// sweep continues.
SweepResult sweep(const Dataset& dataset, const std::vector<ModelId>& models,
                  const std::vector<int>& sizes, int n_repeats, std::uint64_t base_seed,
                  const RunConfig& config);

/// Write results.json, summary.csv, and the two SVG plots; byte-deterministic
/// given equal results.
void emit_results(const SweepResult& result, const std::filesystem::path& out_dir);

std::string sweep_to_json(const SweepResult& result);
SweepResult sweep_from_json(const std::string& text);
SweepResult load_results(const std::filesystem::path& results_json);

bool sweep_equal(const SweepResult& a, const SweepResult& b);  // ignores wall times

/// Self-contained SVG emission (no external renderer).
std::string accuracy_vs_size_svg(const SweepResult& result);
std::string accuracy_distribution_svg(const SweepResult& result);

}  // namespace cvqelm
