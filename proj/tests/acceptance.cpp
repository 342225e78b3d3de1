// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Criteria 7 and 8 need the jet dataset on disk (see README and
// scripts/fetch_jets.py); when it is absent they fail with instructions
// rather than being skipped silently.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "cvqelm/data.hpp"
#include "cvqelm/gaussian.hpp"
#include "cvqelm/harness.hpp"
#include "cvqelm/mlp.hpp"
#include "cvqelm/readout.hpp"
#include "cvqelm/substrate.hpp"
#include "cvqelm/verify.hpp"

namespace fs = std::filesystem;
using namespace cvqelm;

namespace {

int failures = 0;

void report(int criterion, bool pass, const std::string& detail) {
  std::cout << (pass ? "PASS" : "FAIL") << " criterion " << criterion << ": " << detail << "\n";
  if (!pass) ++failures;
}

double seconds_since(const std::chrono::steady_clock::time_point& t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double v) {
  std::ostringstream out;
  out << v;
  return out.str();
}

fs::path jets_path() {
  if (const char* env = std::getenv("CVQELM_DATA_DIR")) return fs::path(env) / "jets.csv";
  return fs::path("data") / "jets.csv";
}

void criterion_1_oracle_equivalence() {
  const auto t0 = std::chrono::steady_clock::now();
  const CheckResult r = check_gaussian_vs_fock(10, 40);
  const double elapsed = seconds_since(t0);
  report(1, r.pass && elapsed < 120.0,
         "PNR+homodyne features vs Fock oracle, 10 draws at M=2: worst |dev| " + fmt(r.deviation) +
             " (tol 1e-6), " + r.detail + ", " + fmt(elapsed) + " s (budget 120 s)");
}

void criterion_2_cx_decomposition() {
  const CheckResult identity = check_cx_decomposition(20);
  const CxDecompositionParams p = cx_decomposition_params(2.0);
  const bool r_ok = std::abs(p.r - (-std::asinh(1.0))) <= 1e-12;
  const bool theta_ok = std::abs(std::abs(p.theta) - M_PI / 8.0) <= 1e-12;
  report(2, identity.pass && r_ok && theta_ok,
         "decomposed vs direct symplectic, 20 random s: worst " + fmt(identity.deviation) +
             " (tol 1e-10); s=2 parameters r = " + fmt(p.r) + ", theta = " + fmt(p.theta) +
             " with |theta| = pi/8 (identity-satisfying branch of cos 2theta = -tanh r)");
}

void criterion_3_symplectic_suite() {
  const CheckResult r = check_symplectic_suite(1000);
  report(3, r.pass, "1000 random compositions: " + r.detail);
}

void criterion_4_readout_optimality() {
  const CheckResult ridge = check_ridge_optimality(100);
  const CheckResult logistic = check_logistic_fixtures();
  const CheckResult mlp = check_mlp_gradient();
  report(4, ridge.pass && logistic.pass && mlp.pass,
         "ridge [" + ridge.detail + "]; logistic [" + logistic.detail + "]; mlp FD [" +
             fmt(mlp.deviation) + " rel, tol 1e-5]");
}

void criterion_5_parameter_accounting() {
  const bool mlp_ok = mlp_param_count(16, 10) == 181 && mlp_param_count(10, 10) == 121 &&
                      mlp_param_count(16, 2) == 37;

  // QELM readout weight count F + R + 1, checked on fitted models.
  bool qelm_ok = true;
  for (int modes : {16, 10}) {
    for (Scheme scheme : {Scheme::Pnr, Scheme::Homodyne}) {
      const int r_dim = feature_dim(modes, scheme);
      const Mat z = Mat::Random(32, r_dim + modes + 1);
      std::vector<int> y(32);
      for (int i = 0; i < 32; ++i) y[i] = i % 2;
      const Vec eta = ridge_fit(z, y, {1e-3, true});
      qelm_ok = qelm_ok && eta.size() == modes + r_dim + 1;
    }
  }
  const int hom16 = 16 + feature_dim(16, Scheme::Homodyne) + 1;
  report(5, mlp_ok && qelm_ok,
         "MLP counts 37/181/121 for (F=16,H=2)/(F=16,H=10)/(F=10,H=10); QELM readout F+R+1 (= " +
             std::to_string(hom16) + " for homodyne M=16)");
}

void criterion_6_synthetic_control() {
  const auto t0 = std::chrono::steady_clock::now();
  const Dataset data = synthetic_gaussians(2, 2.0, 10000, 4242);
  RunConfig cfg;
  const RunRecord rec = run_single(data, ModelId::QelmHomRidge, 5000,
                                   derive_split_seed(4242, 5000, 0),
                                   derive_model_seed(4242, ModelId::QelmHomRidge, 5000, 0), cfg);
  const double elapsed = seconds_since(t0);
  const double gap = std::abs(rec.test_accuracy - 0.8413);
  report(6, gap <= 0.03 && elapsed < 60.0,
         "QELM-HOM-ridge on synthetic_gaussians(F=2, delta=2, N=1e4): test accuracy " +
             fmt(rec.test_accuracy) + ", |acc - 0.8413| = " + fmt(gap) + " (tol 0.03), " +
             fmt(elapsed) + " s (budget 60 s)");
}

std::optional<SweepResult> jets_sweep;

void criteria_7_8_jets() {
  const fs::path path = jets_path();
  if (!fs::exists(path)) {
    const std::string msg =
        "jet dataset not found at " + path.string() +
        " — fetch it with scripts/fetch_jets.py (or set CVQELM_DATA_DIR); the hls4ml jet CSV is "
        "required to run this criterion";
    report(7, false, msg);
    report(8, false, msg);
    return;
  }
  // CVQELM_EXTENDED=1 adds the 1e5 training size and the MLP-H10 comparison.
  const bool extended = std::getenv("CVQELM_EXTENDED") != nullptr;
  const auto t0 = std::chrono::steady_clock::now();
  Dataset data = load_jets(path);
  // Desk-scale evaluation pool: enough rows for the largest training size
  // plus stable val/test estimates, capped to stay inside the budget.
  const int pool = extended ? 250000 : 60000;
  if (data.n() > pool) data = subsample(data, pool, 99);
  std::vector<ModelId> models = {ModelId::QelmHomLogistic, ModelId::MlpH2};
  if (extended) models.push_back(ModelId::MlpH10);
  std::vector<int> sizes = {1000, 5000, 10000};
  if (extended) sizes.push_back(100000);
  RunConfig cfg;
  const SweepResult result = sweep(data, models, sizes, 5, 20250, cfg);
  jets_sweep = result;
  const double elapsed = seconds_since(t0);

  bool accuracy_ok = true;
  bool variance_ok = true;
  std::ostringstream acc_detail;
  std::ostringstream var_detail;
  for (int size : sizes) {
    const SweepCell* qelm = nullptr;
    const SweepCell* mlp = nullptr;
    const SweepCell* mlp10 = nullptr;
    for (const SweepCell& c : result.cells) {
      if (c.n_train != size) continue;
      if (c.model == "QELM-HOM-logistic") qelm = &c;
      if (c.model == "MLP-H2") mlp = &c;
      if (c.model == "MLP-H10") mlp10 = &c;
    }
    if (qelm == nullptr || mlp == nullptr || qelm->n_ok < 5 || mlp->n_ok < 5) {
      accuracy_ok = variance_ok = false;
      continue;
    }
    accuracy_ok = accuracy_ok && qelm->mean_accuracy > mlp->mean_accuracy;
    variance_ok = variance_ok && *qelm->std_accuracy <= *mlp->std_accuracy;
    acc_detail << " n=" << size << ": " << qelm->mean_accuracy << " vs " << mlp->mean_accuracy;
    if (mlp10 != nullptr) acc_detail << " (H10 " << mlp10->mean_accuracy << ")";
    acc_detail << ";";
    var_detail << " n=" << size << ": " << *qelm->std_accuracy << " vs " << *mlp->std_accuracy
               << ";";
  }
  report(7, accuracy_ok && elapsed < 1800.0,
         "jets, QELM-HOM-logistic mean accuracy strictly above MLP-H2 at every size (5 repeats):" +
             acc_detail.str() + " " + fmt(elapsed) + " s (budget 1800 s)");
  report(8, variance_ok,
         "jets, QELM accuracy std <= MLP-H2 std at every size:" + var_detail.str());
}

void criterion_9_determinism() {
  const Dataset data = synthetic_gaussians(3, 1.5, 3000, 31);
  RunConfig cfg;
  cfg.mlp.max_epochs = 30;
  const std::vector<ModelId> models = {ModelId::QelmHomRidge, ModelId::MlpH2};
  const SweepResult a = sweep(data, models, {400, 800}, 2, 777, cfg);
  const SweepResult b = sweep(data, models, {400, 800}, 2, 777, cfg);
  const bool sweep_ok = sweep_equal(a, b);
  bool bitwise = true;
  for (std::size_t i = 0; i < a.cells.size(); ++i) {
    for (std::size_t k = 0; k < a.cells[i].runs.size(); ++k) {
      bitwise = bitwise &&
                a.cells[i].runs[k].test_accuracy == b.cells[i].runs[k].test_accuracy;
    }
  }

  const SubstrateConfig s1 = draw_substrate(16, 1.0, 123456, Scheme::Homodyne);
  const SubstrateConfig s2 = draw_substrate(16, 1.0, 123456, Scheme::Homodyne);
  const bool substrate_ok = substrate_to_json(s1) == substrate_to_json(s2) &&
                            substrate_from_json(substrate_to_json(s1)).thetas == s1.thetas;
  report(9, sweep_ok && bitwise && substrate_ok,
         "sweep rerun reproduces every accuracy bit-identically; substrate JSON regenerates "
         "bit-identically from (M, s_max, seed)");
}

void criterion_10_feature_structure() {
  const CheckResult r = check_feature_map_structure();
  report(10, r.pass, r.detail);
}

}  // namespace

int main() {
  const auto t0 = std::chrono::steady_clock::now();
  criterion_1_oracle_equivalence();
  criterion_2_cx_decomposition();
  criterion_3_symplectic_suite();
  criterion_4_readout_optimality();
  criterion_5_parameter_accounting();
  criterion_6_synthetic_control();
  criteria_7_8_jets();
  criterion_9_determinism();
  criterion_10_feature_structure();
  std::cout << (failures == 0 ? "ALL CRITERIA PASSED" : std::to_string(failures) + " CRITERIA FAILED")
            << " (" << fmt(seconds_since(t0)) << " s total)\n";
  return failures == 0 ? 0 : 1;
}
