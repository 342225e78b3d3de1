#pragma once

#include <string>
#include <vector>

namespace cvqelm {

// The oracle and invariant suites behind `cvqelm verify` and the acceptance
// tests: symplectic/physicality checks, the CX decomposition identity,
// covariance-vs-Fock moment agreement, readout optimality, and the MLP
// finite-difference gradient check.

struct CheckResult {
  std::string name;
  bool pass = false;
  double deviation = 0.0;  // measured worst-case deviation
  double tolerance = 0.0;
  std::string detail;
};

/// Test-only fault injection to prove the checks can fail.
enum class Mutation { None, FlipCxSign };

CheckResult check_symplectic_suite(int n_compositions = 1000);
CheckResult check_cx_decomposition(int n_samples = 20, Mutation mutation = Mutation::None);
CheckResult check_cx_parameters();
CheckResult check_gaussian_vs_fock(int n_draws = 10, int cutoff = 40);
CheckResult check_feature_map_structure();
CheckResult check_ridge_optimality(int n_instances = 100);
CheckResult check_logistic_fixtures();
CheckResult check_mlp_gradient();

std::vector<CheckResult> run_verification(Mutation mutation = Mutation::None);
bool all_passed(const std::vector<CheckResult>& results);
std::string format_report(const std::vector<CheckResult>& results);

}  // namespace cvqelm
