#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cvqelm/gaussian.hpp"

namespace cvqelm {

// Dataset ingestion and deterministic splitting. Loaders read delimited text
// with a header row; schemas are documented in the README. Splits are seeded
// permutations sliced by fraction, and the training slice may be capped for
// sample-size sweeps without touching validation or test rows.

enum class DataSource { Jets, Higgs, Synthetic };

std::string to_string(DataSource source);

struct Dataset {
  Mat x;                                  // N x F
  std::vector<int> y;                     // 0/1 labels
  std::vector<std::string> feature_names;
  DataSource source = DataSource::Synthetic;
  std::string file_digest;    // FNV-1a of the raw file bytes (empty for synthetic)
  std::string config_digest;  // digest of the loader configuration
  std::optional<double> sentinel;  // value marking missing entries (Higgs: -999.0)

  int n() const { return static_cast<int>(x.rows()); }
  int features() const { return static_cast<int>(x.cols()); }
};

/// Default jets label map: {g, q} -> 0 (QCD), {t} -> 1 (Top); w and z dropped.
std::map<std::string, int> default_jets_label_map();

/// Jets CSV: 16 numeric feature columns plus a "class" column in {g,q,w,z,t}.
Dataset load_jets(const std::filesystem::path& path,
                  const std::map<std::string, int>& label_map = default_jets_label_map());

/// Default 10-feature Higgs subset (derived kinematic features).
std::vector<std::string> default_higgs_features();

/// Higgs CSV: named feature columns, a "Label" column in {s, b}; -999.0
/// marks missing values, imputed with training-split medians at split time.
Dataset load_higgs(const std::filesystem::path& path,
                   const std::vector<std::string>& feature_list = default_higgs_features());

/// Two unit-covariance Gaussian classes with means +-(delta/2) e1; Bayes
/// accuracy is Phi(delta/2).
Dataset synthetic_gaussians(int features, double delta, int n, std::uint64_t seed);

/// Generic CSV: a "label" column in {0, 1}, every other column numeric.
Dataset load_labeled_csv(const std::filesystem::path& path);

/// Seeded random subsample of n rows (class mix preserved in expectation);
/// deterministic given (dataset, n, seed).
Dataset subsample(const Dataset& dataset, int n, std::uint64_t seed);

struct SplitSpec {
  double train_fraction = 0.6;
  double val_fraction = 0.2;
  double test_fraction = 0.2;
  std::uint64_t seed = 0;
  std::optional<int> n_train_cap;  // truncates the train slice after splitting
};

struct SplitIndices {
  std::uint64_t seed = 0;
  std::vector<int> train;
  std::vector<int> val;
  std::vector<int> test;
};

struct ImputationStats {
  Vec medians;               // training-split medians per feature
  long imputed_train = 0;
  long imputed_val = 0;
  long imputed_test = 0;
};

struct SplitData {
  Mat x_train, x_val, x_test;
  std::vector<int> y_train, y_val, y_test;
  SplitIndices indices;
  std::optional<ImputationStats> imputation;
};

/// Seeded permutation sliced into contiguous train/val/test index lists;
/// the cap shortens only the train list.
SplitIndices split_indices(int n, const SplitSpec& spec);

/// Materialised splits; sentinel-marked datasets are imputed here with
/// train-split medians.
SplitData split(const Dataset& dataset, const SplitSpec& spec);

std::string split_indices_to_json(const SplitIndices& idx);
SplitIndices split_indices_from_json(const std::string& text);

std::string dataset_digest(const Dataset& dataset);

}  // namespace cvqelm
