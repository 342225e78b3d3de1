#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "cvqelm/data.hpp"
#include "cvqelm/errors.hpp"

using namespace cvqelm;

namespace {

std::filesystem::path write_temp(const std::string& name, const std::string& content) {
  const auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream out(path);
  out << content;
  return path;
}

std::string jets_header() {
  std::string h;
  for (int i = 0; i < 16; ++i) h += "f" + std::to_string(i) + ",";
  return h + "class\n";
}

std::string jets_row(double v, const std::string& cls) {
  std::string row;
  for (int i = 0; i < 16; ++i) row += std::to_string(v + i) + ",";
  return row + cls + "\n";
}

}  // namespace

TEST_CASE("load_jets mapping and filtering") {
  const auto path = write_temp("cvqelm_jets.csv", jets_header() + jets_row(0.1, "g") +
                                                      jets_row(0.2, "t") + jets_row(0.3, "q") +
                                                      jets_row(0.4, "w") + jets_row(0.5, "z"));
  const Dataset d = load_jets(path);
  CHECK(d.features() == 16);
  CHECK(d.n() == 3);  // w and z rows dropped
  CHECK(d.y == std::vector<int>({0, 1, 0}));
  CHECK(d.source == DataSource::Jets);
  CHECK_FALSE(d.file_digest.empty());
  std::filesystem::remove(path);
}

TEST_CASE("load_jets error paths") {
  const auto only_wz = write_temp("cvqelm_jets_wz.csv",
                                  jets_header() + jets_row(0.1, "w") + jets_row(0.2, "z"));
  CHECK_THROWS_AS(load_jets(only_wz), DataError);
  std::filesystem::remove(only_wz);

  const auto missing = write_temp("cvqelm_jets_missing.csv", "f0,f1,kind\n1,2,g\n");
  CHECK_THROWS_AS(load_jets(missing), SchemaError);
  std::filesystem::remove(missing);

  std::string narrow = "f0,f1,class\n1,2,g\n3,4,t\n";
  const auto too_few = write_temp("cvqelm_jets_narrow.csv", narrow);
  CHECK_THROWS_AS(load_jets(too_few), SchemaError);
  std::filesystem::remove(too_few);
}

TEST_CASE("load_higgs selects features and maps labels") {
  std::string content = "EventId,DER_mass_MMC,DER_mass_vis,PRI_tau_pt,Label\n";
  content += "1,120.5,95.0,40.0,s\n";
  content += "2,-999.0,80.0,35.0,b\n";
  content += "3,110.0,85.0,30.0,b\n";
  const auto path = write_temp("cvqelm_higgs.csv", content);
  const Dataset d = load_higgs(path, {"DER_mass_MMC", "DER_mass_vis"});
  CHECK(d.features() == 2);
  CHECK(d.y == std::vector<int>({1, 0, 0}));
  CHECK(d.sentinel.has_value());
  CHECK(*d.sentinel == -999.0);
  CHECK(d.x(1, 0) == -999.0);  // sentinel kept until split-time imputation

  CHECK_THROWS_AS(load_higgs(path, {"DER_mass_MMC", "DER_absent"}), SchemaError);
  std::filesystem::remove(path);
}

TEST_CASE("higgs imputation uses training medians only") {
  // 10 rows; the split is seeded, so imputation statistics come from the
  // train slice. Feature 0 carries sentinels, feature 1 never does.
  std::string content = "DER_mass_MMC,DER_mass_vis,Label\n";
  for (int i = 0; i < 5; ++i) {
    content += std::to_string(100.0 + i) + "," + std::to_string(50.0 + i) + ",s\n";
  }
  for (int i = 0; i < 5; ++i) {
    content += (i % 2 == 0 ? "-999.0" : std::to_string(200.0 + i)) + "," +
               std::to_string(60.0 + i) + ",b\n";
  }
  const auto path = write_temp("cvqelm_higgs_imp.csv", content);
  const Dataset d = load_higgs(path, {"DER_mass_MMC", "DER_mass_vis"});
  SplitSpec spec;
  spec.seed = 5;
  const SplitData s = split(d, spec);
  REQUIRE(s.imputation.has_value());

  // Median over non-sentinel train values of feature 0, recomputed here.
  std::vector<double> vals;
  for (int idx : s.indices.train) {
    if (d.x(idx, 0) != -999.0) vals.push_back(d.x(idx, 0));
  }
  std::sort(vals.begin(), vals.end());
  const double expected = vals.size() % 2 == 1
                              ? vals[vals.size() / 2]
                              : 0.5 * (vals[vals.size() / 2 - 1] + vals[vals.size() / 2]);
  CHECK(s.imputation->medians(0) == expected);

  // Every sentinel (train, val, or test) became the train median.
  long total = s.imputation->imputed_train + s.imputation->imputed_val + s.imputation->imputed_test;
  CHECK(total == 3);
  for (Eigen::Index i = 0; i < s.x_test.rows(); ++i) {
    CHECK(s.x_test(i, 0) != -999.0);
  }
  std::filesystem::remove(path);
}

TEST_CASE("synthetic gaussians") {
  const Dataset a = synthetic_gaussians(3, 2.0, 100, 9);
  const Dataset b = synthetic_gaussians(3, 2.0, 100, 9);
  CHECK(a.x == b.x);
  CHECK(a.y == b.y);
  CHECK(a.n() == 100);
  CHECK(a.features() == 3);

  long ones = std::count(a.y.begin(), a.y.end(), 1);
  CHECK(ones == 50);

  // Class-conditional means separate along the first axis.
  double mean1 = 0.0, mean0 = 0.0;
  for (int i = 0; i < a.n(); ++i) (a.y[i] == 1 ? mean1 : mean0) += a.x(i, 0);
  CHECK(mean1 / ones > 0.5);
  CHECK(mean0 / (a.n() - ones) < -0.5);

  // delta = 0 collapses the classes onto one distribution.
  const Dataset flat = synthetic_gaussians(2, 0.0, 50, 9);
  CHECK(flat.x.col(0).mean() == doctest::Approx(0.0).epsilon(1.0));

  CHECK_THROWS_AS(synthetic_gaussians(0, 1.0, 10, 1), InvalidArgument);
  CHECK_THROWS_AS(synthetic_gaussians(2, -1.0, 10, 1), InvalidArgument);
}

TEST_CASE("split sizes and determinism") {
  SplitSpec spec;
  spec.seed = 3;
  const SplitIndices idx = split_indices(10, spec);
  CHECK(idx.train.size() == 6);
  CHECK(idx.val.size() == 2);
  CHECK(idx.test.size() == 2);

  const SplitIndices again = split_indices(10, spec);
  CHECK(idx.train == again.train);
  CHECK(idx.val == again.val);
  CHECK(idx.test == again.test);

  // Disjoint and exhaustive.
  std::vector<int> all;
  all.insert(all.end(), idx.train.begin(), idx.train.end());
  all.insert(all.end(), idx.val.begin(), idx.val.end());
  all.insert(all.end(), idx.test.begin(), idx.test.end());
  std::sort(all.begin(), all.end());
  for (int i = 0; i < 10; ++i) CHECK(all[i] == i);
}

TEST_CASE("train cap keeps val and test fixed and nests across sizes") {
  SplitSpec spec;
  spec.seed = 4;
  const SplitIndices full = split_indices(100, spec);

  SplitSpec capped3 = spec;
  capped3.n_train_cap = 3;
  const SplitIndices small = split_indices(100, capped3);
  CHECK(small.train.size() == 3);
  CHECK(small.val == full.val);
  CHECK(small.test == full.test);

  SplitSpec capped10 = spec;
  capped10.n_train_cap = 10;
  const SplitIndices mid = split_indices(100, capped10);
  for (std::size_t i = 0; i < small.train.size(); ++i) {
    CHECK(small.train[i] == mid.train[i]);  // prefix containment
    CHECK(mid.train[i] == full.train[i]);
  }

  SplitSpec over = spec;
  over.n_train_cap = 61;
  CHECK_THROWS_AS(split_indices(100, over), InvalidArgument);

  SplitSpec bad;
  bad.train_fraction = 0.5;
  bad.val_fraction = 0.2;
  bad.test_fraction = 0.2;
  CHECK_THROWS_AS(split_indices(100, bad), InvalidArgument);
}

TEST_CASE("split json round trip") {
  SplitSpec spec;
  spec.seed = 12;
  const SplitIndices idx = split_indices(20, spec);
  const SplitIndices back = split_indices_from_json(split_indices_to_json(idx));
  CHECK(back.seed == idx.seed);
  CHECK(back.train == idx.train);
  CHECK(back.val == idx.val);
  CHECK(back.test == idx.test);
  CHECK_THROWS_AS(split_indices_from_json("{"), SchemaError);
}

TEST_CASE("labeled csv loader") {
  const auto path = write_temp("cvqelm_plain.csv", "a,b,label\n1.0,2.0,1\n3.0,4.0,0\n");
  const Dataset d = load_labeled_csv(path);
  CHECK(d.features() == 2);
  CHECK(d.y == std::vector<int>({1, 0}));
  CHECK(d.feature_names == std::vector<std::string>({"a", "b"}));
  std::filesystem::remove(path);

  const auto bad = write_temp("cvqelm_plain_bad.csv", "a,label\n1.0,2\n");
  CHECK_THROWS_AS(load_labeled_csv(bad), SchemaError);
  std::filesystem::remove(bad);
}

TEST_CASE("subsample keeps both classes and is deterministic") {
  const Dataset d = synthetic_gaussians(2, 1.0, 500, 3);
  const Dataset a = subsample(d, 50, 7);
  const Dataset b = subsample(d, 50, 7);
  CHECK(a.x == b.x);
  CHECK(a.y == b.y);
  CHECK(a.n() == 50);
  long ones = std::count(a.y.begin(), a.y.end(), 1);
  CHECK(ones > 0);
  CHECK(ones < 50);
  CHECK(subsample(d, 600, 7).n() == 500);  // no-op beyond the dataset size
}
