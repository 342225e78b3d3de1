#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "cvqelm/gaussian.hpp"
#include "cvqelm/substrate.hpp"

namespace cvqelm {

// Linear readouts over the concatenated design [Phi(x) | x | 1]: closed-form
// ridge regression and damped-Newton logistic regression, plus the input
// standardization both consume.

/// Column-wise z-score statistics fitted on the training split only.
struct Standardizer {
  Vec means;
  Vec stds;                     // zero-variance columns are stored as 1
  std::vector<bool> constant;   // flags for those columns
};

Standardizer standardize_fit(const Mat& x_train);
Mat standardize_apply(const Standardizer& s, const Mat& x);

/// Z row = [phi_row | x_row | 1].
Mat assemble_design(const Mat& phi, const Mat& x);

enum class ReadoutKind { Ridge, Logistic };

std::string to_string(ReadoutKind kind);
ReadoutKind readout_kind_from_string(const std::string& name);

struct RidgeOptions {
  double lambda = 1e-3;
  bool penalize_bias = true;  // the closed form regularises every weight
};

/// Solve (Z^T Z + lambda I) eta = Z^T T' with labels mapped to T' in {-1,+1},
/// via a Cholesky-type factorization (never an explicit inverse).
Vec ridge_fit(const Mat& z, const std::vector<int>& labels, const RidgeOptions& opts);

/// Max-norm of the ridge objective gradient 2 Z^T(Z eta - T') + 2 lambda eta.
double ridge_gradient_norm(const Mat& z, const std::vector<int>& labels, double lambda,
                           const Vec& eta);

struct LogisticReport {
  int iterations = 0;
  double gradient_norm = 0.0;
  bool converged = false;
  std::vector<double> objective;  // per accepted step, non-decreasing
};

/// Maximise the L2-regularised log-likelihood by damped Newton ascent from
/// eta = 0. Deterministic; non-convergence is reported, not thrown.
Vec logistic_fit(const Mat& z, const std::vector<int>& labels, double lambda, double tol = 1e-8,
                 int max_iter = 100, LogisticReport* report = nullptr);

double logistic_objective(const Mat& z, const std::vector<int>& labels, double lambda,
                          const Vec& eta);

struct ReadoutModel {
  ReadoutKind kind = ReadoutKind::Ridge;
  double lambda = 1e-3;
  Scheme scheme = Scheme::Homodyne;
  Vec weights;  // length F + R + 1, bias last
  Standardizer standardizer;
  int input_dim = 0;    // F
  int feature_dim = 0;  // R
};

/// Raw score eta . [phi | x | 1] and thresholded label (score 0 -> 0).
std::pair<double, int> predict(const ReadoutModel& model, const Vec& phi_row, const Vec& x_row);

std::vector<int> predict_labels(const ReadoutModel& model, const Mat& phi, const Mat& x);

double accuracy(const std::vector<int>& predicted, const std::vector<int>& truth);

std::string readout_to_json(const ReadoutModel& model);
ReadoutModel readout_from_json(const std::string& text);
void save_readout(const ReadoutModel& model, const std::filesystem::path& path);
ReadoutModel load_readout(const std::filesystem::path& path);

}  // namespace cvqelm
