#include "cvqelm/readout.hpp"

#include <cmath>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "cvqelm/errors.hpp"

namespace cvqelm {

using json = nlohmann::ordered_json;

namespace {

void require_finite(const Mat& m, const char* what) {
  if (!m.allFinite()) throw DataError(std::string(what) + " contains non-finite values");
}

Vec signed_targets(const std::vector<int>& labels) {
  Vec t(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] != 0 && labels[i] != 1) throw InvalidArgument("labels must be 0 or 1");
    t(i) = labels[i] == 1 ? 1.0 : -1.0;
  }
  return t;
}

double sigmoid(double z) { return z >= 0.0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z)); }

/// log sigma(z), computed without overflow.
double log_sigmoid(double z) { return z >= 0.0 ? -std::log1p(std::exp(-z)) : z - std::log1p(std::exp(z)); }

}  // namespace

Standardizer standardize_fit(const Mat& x_train) {
  if (x_train.rows() < 2) throw InvalidArgument("standardize_fit needs at least 2 rows");
  require_finite(x_train, "training matrix");
  const Eigen::Index cols = x_train.cols();
  Standardizer s;
  s.means = x_train.colwise().mean();
  s.stds.resize(cols);
  s.constant.assign(cols, false);
  const double n = double(x_train.rows());
  for (Eigen::Index j = 0; j < cols; ++j) {
    const double var = (x_train.col(j).array() - s.means(j)).square().sum() / (n - 1.0);
    const double sd = std::sqrt(var);
    if (sd > 0.0) {
      s.stds(j) = sd;
    } else {
      s.stds(j) = 1.0;  // constant column maps to zero
      s.constant[j] = true;
    }
  }
  return s;
}

Mat standardize_apply(const Standardizer& s, const Mat& x) {
  if (x.cols() != s.means.size()) throw InvalidArgument("standardize_apply: column count mismatch");
  Mat out = x;
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    out.col(j) = (x.col(j).array() - s.means(j)) / s.stds(j);
  }
  return out;
}

Mat assemble_design(const Mat& phi, const Mat& x) {
  if (phi.rows() != x.rows()) throw InvalidArgument("assemble_design: row count mismatch");
  Mat z(phi.rows(), phi.cols() + x.cols() + 1);
  z.leftCols(phi.cols()) = phi;
  z.middleCols(phi.cols(), x.cols()) = x;
  z.col(z.cols() - 1).setOnes();
  return z;
}

std::string to_string(ReadoutKind kind) { return kind == ReadoutKind::Ridge ? "ridge" : "logistic"; }

ReadoutKind readout_kind_from_string(const std::string& name) {
  if (name == "ridge") return ReadoutKind::Ridge;
  if (name == "logistic") return ReadoutKind::Logistic;
  throw InvalidArgument("unknown readout kind: " + name);
}

Vec ridge_fit(const Mat& z, const std::vector<int>& labels, const RidgeOptions& opts) {
  if (opts.lambda <= 0.0) throw InvalidArgument("ridge_fit: lambda must be > 0");
  if (static_cast<Eigen::Index>(labels.size()) != z.rows()) {
    throw InvalidArgument("ridge_fit: label count mismatch");
  }
  require_finite(z, "design matrix");
  const Vec t = signed_targets(labels);
  Mat normal = z.transpose() * z;
  for (Eigen::Index j = 0; j < normal.rows(); ++j) {
    const bool is_bias = (j == normal.rows() - 1);
    if (opts.penalize_bias || !is_bias) normal(j, j) += opts.lambda;
  }
  Eigen::LDLT<Mat> solver(normal);
  if (solver.info() != Eigen::Success) throw DataError("ridge normal equations not factorizable");
  return solver.solve(z.transpose() * t);
}

double ridge_gradient_norm(const Mat& z, const std::vector<int>& labels, double lambda,
                           const Vec& eta) {
  const Vec t = signed_targets(labels);
  const Vec grad = 2.0 * (z.transpose() * (z * eta - t)) + 2.0 * lambda * eta;
  return grad.cwiseAbs().maxCoeff();
}

double logistic_objective(const Mat& z, const std::vector<int>& labels, double lambda,
                          const Vec& eta) {
  const Vec scores = z * eta;
  double obj = 0.0;
  for (Eigen::Index i = 0; i < scores.size(); ++i) {
    obj += labels[i] == 1 ? log_sigmoid(scores(i)) : log_sigmoid(-scores(i));
  }
  return obj - 0.5 * lambda * eta.squaredNorm();
}

Vec logistic_fit(const Mat& z, const std::vector<int>& labels, double lambda, double tol,
                 int max_iter, LogisticReport* report) {
  if (lambda < 0.0) throw InvalidArgument("logistic_fit: lambda must be >= 0");
  if (tol <= 0.0) throw InvalidArgument("logistic_fit: tol must be > 0");
  if (static_cast<Eigen::Index>(labels.size()) != z.rows()) {
    throw InvalidArgument("logistic_fit: label count mismatch");
  }
  require_finite(z, "design matrix");
  signed_targets(labels);  // validates label values

  const Eigen::Index p = z.cols();
  Vec eta = Vec::Zero(p);
  LogisticReport rep;
  rep.objective.push_back(logistic_objective(z, labels, lambda, eta));

  for (int iter = 0; iter < max_iter; ++iter) {
    const Vec scores = z * eta;
    Vec prob(scores.size());
    Vec w(scores.size());
    for (Eigen::Index i = 0; i < scores.size(); ++i) {
      prob(i) = sigmoid(scores(i));
      w(i) = prob(i) * (1.0 - prob(i));
    }
    Vec residual(scores.size());
    for (Eigen::Index i = 0; i < scores.size(); ++i) residual(i) = double(labels[i]) - prob(i);
    const Vec grad = z.transpose() * residual - lambda * eta;
    rep.gradient_norm = grad.cwiseAbs().maxCoeff();
    rep.iterations = iter;
    if (rep.gradient_norm < tol) {
      rep.converged = true;
      break;
    }

    Mat hessian = z.transpose() * w.asDiagonal() * z;
    hessian.diagonal().array() += lambda;
    Eigen::LDLT<Mat> solver(hessian);
    Vec step = solver.solve(grad);
    if (solver.info() != Eigen::Success || !step.allFinite()) step = grad;  // fallback ascent

    // Step halving keeps the objective non-decreasing (the objective is
    // concave, so the full Newton step can overshoot only on ill-scaled data).
    const double current = rep.objective.back();
    double t_step = 1.0;
    bool accepted = false;
    for (int h = 0; h < 40; ++h) {
      const Vec trial = eta + t_step * step;
      const double obj = logistic_objective(z, labels, lambda, trial);
      if (std::isfinite(obj) && obj >= current) {
        eta = trial;
        rep.objective.push_back(obj);
        accepted = true;
        break;
      }
      t_step *= 0.5;
    }
    if (!accepted) break;  // no ascent direction left at this scale
  }

  if (!rep.converged) {
    const Vec scores = z * eta;
    Vec residual(scores.size());
    for (Eigen::Index i = 0; i < scores.size(); ++i) {
      residual(i) = double(labels[i]) - sigmoid(scores(i));
    }
    rep.gradient_norm = (z.transpose() * residual - lambda * eta).cwiseAbs().maxCoeff();
    rep.converged = rep.gradient_norm < tol;
  }
  if (report != nullptr) *report = rep;
  return eta;
}

std::pair<double, int> predict(const ReadoutModel& model, const Vec& phi_row, const Vec& x_row) {
  if (phi_row.size() != model.feature_dim || x_row.size() != model.input_dim) {
    throw InvalidArgument("predict: feature dimensions do not match the model");
  }
  if (model.weights.size() != model.feature_dim + model.input_dim + 1) {
    throw InvalidArgument("predict: model weight vector has the wrong length");
  }
  double score = model.weights(model.weights.size() - 1);
  score += model.weights.head(model.feature_dim).dot(phi_row);
  score += model.weights.segment(model.feature_dim, model.input_dim).dot(x_row);
  // Ridge thresholds the raw score at zero; logistic thresholds sigma(score)
  // at 1/2, which is the same boundary. Exact zero resolves to label 0.
  return {score, score > 0.0 ? 1 : 0};
}

std::vector<int> predict_labels(const ReadoutModel& model, const Mat& phi, const Mat& x) {
  if (phi.rows() != x.rows()) throw InvalidArgument("predict_labels: row count mismatch");
  std::vector<int> labels(phi.rows());
  for (Eigen::Index i = 0; i < phi.rows(); ++i) {
    labels[i] = predict(model, phi.row(i).transpose(), x.row(i).transpose()).second;
  }
  return labels;
}

double accuracy(const std::vector<int>& predicted, const std::vector<int>& truth) {
  if (predicted.empty()) throw InvalidArgument("accuracy: empty label vectors");
  if (predicted.size() != truth.size()) throw InvalidArgument("accuracy: length mismatch");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < predicted.size(); ++i) hits += predicted[i] == truth[i] ? 1 : 0;
  return double(hits) / double(predicted.size());
}

std::string readout_to_json(const ReadoutModel& model) {
  json j;
  j["kind"] = to_string(model.kind);
  j["lambda"] = model.lambda;
  j["scheme"] = to_string(model.scheme);
  j["weights"] = std::vector<double>(model.weights.begin(), model.weights.end());
  j["standardizer"] = {
      {"means", std::vector<double>(model.standardizer.means.begin(), model.standardizer.means.end())},
      {"stds", std::vector<double>(model.standardizer.stds.begin(), model.standardizer.stds.end())}};
  j["feature_dims"] = {{"F", model.input_dim}, {"R", model.feature_dim}};
  return j.dump(2);
}

ReadoutModel readout_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw SchemaError(std::string("readout JSON parse error: ") + e.what());
  }
  ReadoutModel m;
  try {
    m.kind = readout_kind_from_string(j.at("kind").get<std::string>());
    m.lambda = j.at("lambda").get<double>();
    m.scheme = scheme_from_string(j.at("scheme").get<std::string>());
    const auto w = j.at("weights").get<std::vector<double>>();
    m.weights = Eigen::Map<const Vec>(w.data(), w.size());
    const auto means = j.at("standardizer").at("means").get<std::vector<double>>();
    const auto stds = j.at("standardizer").at("stds").get<std::vector<double>>();
    m.standardizer.means = Eigen::Map<const Vec>(means.data(), means.size());
    m.standardizer.stds = Eigen::Map<const Vec>(stds.data(), stds.size());
    m.standardizer.constant.assign(means.size(), false);
    m.input_dim = j.at("feature_dims").at("F").get<int>();
    m.feature_dim = j.at("feature_dims").at("R").get<int>();
  } catch (const json::exception& e) {
    throw SchemaError(std::string("readout JSON missing field: ") + e.what());
  }
  if (m.weights.size() != m.input_dim + m.feature_dim + 1) {
    throw SchemaError("readout JSON: weight length != F + R + 1");
  }
  return m;
}

void save_readout(const ReadoutModel& model, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open " + path.string() + " for writing");
  out << readout_to_json(model) << "\n";
}

ReadoutModel load_readout(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return readout_from_json(ss.str());
}

}  // namespace cvqelm
