#include "cvqelm/data.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "cvqelm/errors.hpp"
#include "cvqelm/rng.hpp"

namespace cvqelm {

using json = nlohmann::ordered_json;

std::string to_string(DataSource source) {
  switch (source) {
    case DataSource::Jets: return "jets";
    case DataSource::Higgs: return "higgs";
    case DataSource::Synthetic: return "synthetic";
  }
  return "unknown";
}

namespace {

std::vector<std::string> split_line(const std::string& line, char delim) {
  std::vector<std::string> out;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, delim)) {
    while (!field.empty() && (field.back() == '\r' || field.back() == ' ')) field.pop_back();
    std::size_t start = 0;
    while (start < field.size() && field[start] == ' ') ++start;
    out.push_back(field.substr(start));
  }
  if (!line.empty() && line.back() == delim) out.push_back("");
  return out;
}

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::string digest;
};

Table read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string content = buffer.str();

  Table t;
  {
    char digest[17];
    std::snprintf(digest, sizeof(digest), "%016llx",
                  static_cast<unsigned long long>(fnv1a(content)));
    t.digest = digest;
  }
  std::stringstream ss(content);
  std::string line;
  if (!std::getline(ss, line)) throw SchemaError(path.string() + ": empty file");
  t.header = split_line(line, ',');
  while (std::getline(ss, line)) {
    if (line.empty() || line == "\r") continue;
    auto fields = split_line(line, ',');
    if (fields.size() != t.header.size()) {
      throw SchemaError(path.string() + ": row has " + std::to_string(fields.size()) +
                        " fields, header has " + std::to_string(t.header.size()));
    }
    t.rows.push_back(std::move(fields));
  }
  return t;
}

double parse_number(const std::string& field, const std::string& context) {
  char* end = nullptr;
  const double v = std::strtod(field.c_str(), &end);
  if (end == field.c_str() || *end != '\0') {
    throw SchemaError(context + ": not a number: '" + field + "'");
  }
  if (!std::isfinite(v)) throw DataError(context + ": non-finite value '" + field + "'");
  return v;
}

int find_column(const Table& t, const std::string& name) {
  for (std::size_t j = 0; j < t.header.size(); ++j) {
    if (t.header[j] == name) return static_cast<int>(j);
  }
  return -1;
}

void check_class_counts(const std::vector<int>& y, const std::string& what) {
  long ones = std::count(y.begin(), y.end(), 1);
  if (y.empty() || ones == 0 || ones == static_cast<long>(y.size())) {
    throw DataError(what + ": need at least one sample of each class");
  }
}

std::string hex_digest(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace

std::map<std::string, int> default_jets_label_map() {
  return {{"g", 0}, {"q", 0}, {"t", 1}};
}

Dataset load_jets(const std::filesystem::path& path, const std::map<std::string, int>& label_map) {
  const Table t = read_csv(path);
  const int class_col = find_column(t, "class");
  if (class_col < 0) throw SchemaError(path.string() + ": missing 'class' column");
  const int n_features = static_cast<int>(t.header.size()) - 1;
  if (n_features != 16) {
    throw SchemaError(path.string() + ": expected 16 feature columns, found " +
                      std::to_string(n_features));
  }

  Dataset d;
  d.source = DataSource::Jets;
  d.file_digest = t.digest;
  for (int j = 0; j < static_cast<int>(t.header.size()); ++j) {
    if (j != class_col) d.feature_names.push_back(t.header[j]);
  }
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const std::string& cls = t.rows[i][class_col];
    const auto it = label_map.find(cls);
    if (it == label_map.end()) continue;  // dropped class (w, z by default)
    std::vector<double> row;
    row.reserve(n_features + 1);
    for (int j = 0; j < static_cast<int>(t.header.size()); ++j) {
      if (j == class_col) continue;
      row.push_back(parse_number(t.rows[i][j], path.string() + " row " + std::to_string(i + 2)));
    }
    row.push_back(double(it->second));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw DataError(path.string() + ": no rows left after class filtering");

  d.x.resize(rows.size(), n_features);
  d.y.resize(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (int j = 0; j < n_features; ++j) d.x(i, j) = rows[i][j];
    d.y[i] = static_cast<int>(rows[i][n_features]);
  }
  check_class_counts(d.y, path.string());

  json cfg;
  for (const auto& [k, v] : label_map) cfg[k] = v;
  d.config_digest = hex_digest(fnv1a(cfg.dump()));
  return d;
}

std::vector<std::string> default_higgs_features() {
  return {"DER_mass_MMC",
          "DER_mass_transverse_met_lep",
          "DER_mass_vis",
          "DER_pt_h",
          "DER_deltar_tau_lep",
          "DER_pt_tot",
          "DER_sum_pt",
          "DER_pt_ratio_lep_tau",
          "DER_met_phi_centrality",
          "DER_mass_jet_jet"};
}

Dataset load_higgs(const std::filesystem::path& path, const std::vector<std::string>& feature_list) {
  const Table t = read_csv(path);
  const int label_col = find_column(t, "Label");
  if (label_col < 0) throw SchemaError(path.string() + ": missing 'Label' column");
  std::vector<int> cols;
  for (const std::string& name : feature_list) {
    const int c = find_column(t, name);
    if (c < 0) throw SchemaError(path.string() + ": missing feature column '" + name + "'");
    cols.push_back(c);
  }

  Dataset d;
  d.source = DataSource::Higgs;
  d.file_digest = t.digest;
  d.feature_names = feature_list;
  d.sentinel = -999.0;
  d.x.resize(t.rows.size(), cols.size());
  d.y.resize(t.rows.size());
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const std::string& label = t.rows[i][label_col];
    if (label == "s") {
      d.y[i] = 1;
    } else if (label == "b") {
      d.y[i] = 0;
    } else {
      throw SchemaError(path.string() + ": unknown label '" + label + "'");
    }
    for (std::size_t j = 0; j < cols.size(); ++j) {
      d.x(i, j) = parse_number(t.rows[i][cols[j]], path.string() + " row " + std::to_string(i + 2));
    }
  }
  if (d.y.empty()) throw DataError(path.string() + ": no data rows");
  check_class_counts(d.y, path.string());

  json cfg = feature_list;
  d.config_digest = hex_digest(fnv1a(cfg.dump()));
  return d;
}

Dataset synthetic_gaussians(int features, double delta, int n, std::uint64_t seed) {
  if (features < 1) throw InvalidArgument("synthetic_gaussians: features must be >= 1");
  if (n < 2) throw InvalidArgument("synthetic_gaussians: need at least 2 samples");
  if (delta < 0.0) throw InvalidArgument("synthetic_gaussians: delta must be >= 0");
  Dataset d;
  d.source = DataSource::Synthetic;
  d.x.resize(n, features);
  d.y.resize(n);
  for (int i = 0; i < n; ++i) {
    const int label = i % 2;  // balanced classes
    RngStream rng(mix(seed, std::uint64_t(i)));
    for (int j = 0; j < features; ++j) d.x(i, j) = rng.next_normal();
    d.x(i, 0) += (label == 1 ? 0.5 : -0.5) * delta;
    d.y[i] = label;
  }
  for (int j = 0; j < features; ++j) d.feature_names.push_back("f" + std::to_string(j));
  json cfg;
  cfg["features"] = features;
  cfg["delta"] = delta;
  cfg["n"] = n;
  cfg["seed"] = seed;
  d.config_digest = hex_digest(fnv1a(cfg.dump()));
  return d;
}

Dataset load_labeled_csv(const std::filesystem::path& path) {
  const Table t = read_csv(path);
  const int label_col = find_column(t, "label");
  if (label_col < 0) throw SchemaError(path.string() + ": missing 'label' column");
  Dataset d;
  d.source = DataSource::Synthetic;
  d.file_digest = t.digest;
  for (int j = 0; j < static_cast<int>(t.header.size()); ++j) {
    if (j != label_col) d.feature_names.push_back(t.header[j]);
  }
  const int n_features = static_cast<int>(t.header.size()) - 1;
  if (n_features < 1) throw SchemaError(path.string() + ": no feature columns");
  d.x.resize(t.rows.size(), n_features);
  d.y.resize(t.rows.size());
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    int jj = 0;
    for (int j = 0; j < static_cast<int>(t.header.size()); ++j) {
      if (j == label_col) continue;
      d.x(i, jj++) = parse_number(t.rows[i][j], path.string() + " row " + std::to_string(i + 2));
    }
    const std::string& label = t.rows[i][label_col];
    if (label == "0") {
      d.y[i] = 0;
    } else if (label == "1") {
      d.y[i] = 1;
    } else {
      throw SchemaError(path.string() + ": label must be 0 or 1, got '" + label + "'");
    }
  }
  if (d.y.empty()) throw DataError(path.string() + ": no data rows");
  check_class_counts(d.y, path.string());
  d.config_digest = hex_digest(fnv1a("labeled-csv"));
  return d;
}

Dataset subsample(const Dataset& dataset, int n, std::uint64_t seed) {
  if (n < 2) throw InvalidArgument("subsample: need at least 2 rows");
  if (n >= dataset.n()) return dataset;
  std::vector<int> perm(dataset.n());
  for (int i = 0; i < dataset.n(); ++i) perm[i] = i;
  RngStream rng(mix(seed, 0x73756273));
  for (int i = dataset.n() - 1; i > 0; --i) {
    const int j = static_cast<int>(rng.next_below(std::uint64_t(i) + 1));
    std::swap(perm[i], perm[j]);
  }
  Dataset out = dataset;
  out.x.resize(n, dataset.features());
  out.y.resize(n);
  for (int i = 0; i < n; ++i) {
    out.x.row(i) = dataset.x.row(perm[i]);
    out.y[i] = dataset.y[perm[i]];
  }
  check_class_counts(out.y, "subsample");
  out.config_digest = hex_digest(fnv1a(dataset.config_digest + "|subsample:" + std::to_string(n) +
                                       ":" + std::to_string(seed)));
  return out;
}

SplitIndices split_indices(int n, const SplitSpec& spec) {
  if (n < 3) throw InvalidArgument("split: need at least 3 samples");
  if (spec.train_fraction <= 0.0 || spec.val_fraction <= 0.0 || spec.test_fraction <= 0.0) {
    throw InvalidArgument("split: fractions must be positive");
  }
  if (std::abs(spec.train_fraction + spec.val_fraction + spec.test_fraction - 1.0) > 1e-9) {
    throw InvalidArgument("split: fractions must sum to 1");
  }

  std::vector<int> perm(n);
  for (int i = 0; i < n; ++i) perm[i] = i;
  RngStream rng(mix(spec.seed, 0x73706c69));
  for (int i = n - 1; i > 0; --i) {
    const int j = static_cast<int>(rng.next_below(std::uint64_t(i) + 1));
    std::swap(perm[i], perm[j]);
  }

  const int n_train = static_cast<int>(std::floor(spec.train_fraction * n));
  const int n_val = static_cast<int>(std::floor(spec.val_fraction * n));
  SplitIndices idx;
  idx.seed = spec.seed;
  idx.train.assign(perm.begin(), perm.begin() + n_train);
  idx.val.assign(perm.begin() + n_train, perm.begin() + n_train + n_val);
  idx.test.assign(perm.begin() + n_train + n_val, perm.end());

  if (spec.n_train_cap) {
    if (*spec.n_train_cap < 1 || *spec.n_train_cap > n_train) {
      throw InvalidArgument("split: n_train_cap " + std::to_string(*spec.n_train_cap) +
                            " outside [1, " + std::to_string(n_train) + "]");
    }
    idx.train.resize(*spec.n_train_cap);  // prefix, so sweep sizes nest
  }
  return idx;
}

namespace {

Mat gather_rows(const Mat& x, const std::vector<int>& rows) {
  Mat out(rows.size(), x.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) out.row(i) = x.row(rows[i]);
  return out;
}

std::vector<int> gather_labels(const std::vector<int>& y, const std::vector<int>& rows) {
  std::vector<int> out(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) out[i] = y[rows[i]];
  return out;
}

double median_of(std::vector<double> v) {
  if (v.empty()) return 0.0;  // all-missing feature; flagged by caller
  std::sort(v.begin(), v.end());
  const std::size_t mid = v.size() / 2;
  return v.size() % 2 == 1 ? v[mid] : 0.5 * (v[mid - 1] + v[mid]);
}

long impute_with(Mat& x, const Vec& medians, double sentinel) {
  long count = 0;
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
      if (x(i, j) == sentinel) {
        x(i, j) = medians(j);
        ++count;
      }
    }
  }
  return count;
}

}  // namespace

SplitData split(const Dataset& dataset, const SplitSpec& spec) {
  const SplitIndices idx = split_indices(dataset.n(), spec);
  SplitData s;
  s.indices = idx;
  s.x_train = gather_rows(dataset.x, idx.train);
  s.x_val = gather_rows(dataset.x, idx.val);
  s.x_test = gather_rows(dataset.x, idx.test);
  s.y_train = gather_labels(dataset.y, idx.train);
  s.y_val = gather_labels(dataset.y, idx.val);
  s.y_test = gather_labels(dataset.y, idx.test);

  if (dataset.sentinel) {
    // Medians come from the (capped) training slice only.
    const double sentinel = *dataset.sentinel;
    ImputationStats stats;
    stats.medians.resize(dataset.features());
    for (int j = 0; j < dataset.features(); ++j) {
      std::vector<double> vals;
      vals.reserve(s.x_train.rows());
      for (Eigen::Index i = 0; i < s.x_train.rows(); ++i) {
        if (s.x_train(i, j) != sentinel) vals.push_back(s.x_train(i, j));
      }
      stats.medians(j) = median_of(std::move(vals));
    }
    stats.imputed_train = impute_with(s.x_train, stats.medians, sentinel);
    stats.imputed_val = impute_with(s.x_val, stats.medians, sentinel);
    stats.imputed_test = impute_with(s.x_test, stats.medians, sentinel);
    s.imputation = stats;
  }
  return s;
}

std::string split_indices_to_json(const SplitIndices& idx) {
  json j;
  j["seed"] = idx.seed;
  j["train"] = idx.train;
  j["val"] = idx.val;
  j["test"] = idx.test;
  return j.dump();
}

SplitIndices split_indices_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw SchemaError(std::string("split JSON parse error: ") + e.what());
  }
  SplitIndices idx;
  try {
    idx.seed = j.at("seed").get<std::uint64_t>();
    idx.train = j.at("train").get<std::vector<int>>();
    idx.val = j.at("val").get<std::vector<int>>();
    idx.test = j.at("test").get<std::vector<int>>();
  } catch (const json::exception& e) {
    throw SchemaError(std::string("split JSON missing field: ") + e.what());
  }
  return idx;
}

std::string dataset_digest(const Dataset& dataset) {
  std::uint64_t h = fnv1a(to_string(dataset.source));
  h = fnv1a(dataset.file_digest, h);
  h = fnv1a(dataset.config_digest, h);
  h = fnv1a(std::to_string(dataset.n()), h);
  return hex_digest(h);
}

}  // namespace cvqelm
