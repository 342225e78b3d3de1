#include "cvqelm/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <nlohmann/json.hpp>
#include <numeric>

#include "cvqelm/errors.hpp"
#include "cvqelm/rng.hpp"

namespace cvqelm {

using json = nlohmann::ordered_json;

int mlp_param_count(int input_dim, int hidden_dim) {
  return hidden_dim * (input_dim + 2) + 1;
}

int mlp_param_count(const MlpModel& model) {
  return mlp_param_count(model.input_dim(), model.hidden_dim());
}

MlpModel mlp_init(int input_dim, int hidden_dim, std::uint64_t seed) {
  if (input_dim < 1 || hidden_dim < 1) throw InvalidArgument("mlp_init: dims must be >= 1");
  MlpModel m;
  m.seed = seed;
  RngStream rng(mix(seed, 0x6d6c7000));
  const double s1 = 1.0 / std::sqrt(double(input_dim));
  const double s2 = 1.0 / std::sqrt(double(hidden_dim));
  m.w1.resize(hidden_dim, input_dim);
  for (int i = 0; i < hidden_dim; ++i) {
    for (int j = 0; j < input_dim; ++j) m.w1(i, j) = rng.next_uniform(-s1, s1);
  }
  m.b1.resize(hidden_dim);
  for (int i = 0; i < hidden_dim; ++i) m.b1(i) = rng.next_uniform(-s1, s1);
  m.w2.resize(hidden_dim);
  for (int i = 0; i < hidden_dim; ++i) m.w2(i) = rng.next_uniform(-s2, s2);
  m.b2 = rng.next_uniform(-s2, s2);
  return m;
}

Vec mlp_logits(const MlpModel& model, const Mat& x) {
  if (x.cols() != model.input_dim()) throw InvalidArgument("mlp_logits: feature count mismatch");
  Mat pre = (x * model.w1.transpose()).rowwise() + model.b1.transpose();
  Mat act = pre.cwiseMax(0.0);
  return (act * model.w2).array() + model.b2;
}

std::vector<int> mlp_predict(const MlpModel& model, const Mat& x) {
  const Vec logits = mlp_logits(model, x);
  std::vector<int> labels(logits.size());
  // sigma(logit) > 1/2 iff logit > 0; exact zero resolves to label 0.
  for (Eigen::Index i = 0; i < logits.size(); ++i) labels[i] = logits(i) > 0.0 ? 1 : 0;
  return labels;
}

namespace {

double bce_from_logit(double logit, int label) {
  // -[y log sigma + (1-y) log(1-sigma)], stable in both tails.
  const double z = label == 1 ? logit : -logit;
  return z >= 0.0 ? std::log1p(std::exp(-z)) : -z + std::log1p(std::exp(z));
}

double label_accuracy(const MlpModel& model, const Mat& x, const std::vector<int>& y) {
  const std::vector<int> pred = mlp_predict(model, x);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < y.size(); ++i) hits += pred[i] == y[i] ? 1 : 0;
  return double(hits) / double(y.size());
}

struct AdamState {
  Mat m_w1, v_w1;
  Vec m_b1, v_b1, m_w2, v_w2;
  double m_b2 = 0.0, v_b2 = 0.0;
  long t = 0;

  explicit AdamState(const MlpModel& model)
      : m_w1(Mat::Zero(model.w1.rows(), model.w1.cols())),
        v_w1(Mat::Zero(model.w1.rows(), model.w1.cols())),
        m_b1(Vec::Zero(model.b1.size())),
        v_b1(Vec::Zero(model.b1.size())),
        m_w2(Vec::Zero(model.w2.size())),
        v_w2(Vec::Zero(model.w2.size())) {}
};

constexpr double kBeta1 = 0.9;
constexpr double kBeta2 = 0.999;
constexpr double kEps = 1e-8;

template <typename T>
void adam_update(T& param, T& m, T& v, const T& grad, double step, long t) {
  m = kBeta1 * m + (1.0 - kBeta1) * grad;
  v = kBeta2 * v + (1.0 - kBeta2) * grad.cwiseProduct(grad);
  const double bc1 = 1.0 - std::pow(kBeta1, double(t));
  const double bc2 = 1.0 - std::pow(kBeta2, double(t));
  param.array() -= step * (m.array() / bc1) / ((v.array() / bc2).sqrt() + kEps);
}

void adam_update_scalar(double& param, double& m, double& v, double grad, double step, long t) {
  m = kBeta1 * m + (1.0 - kBeta1) * grad;
  v = kBeta2 * v + (1.0 - kBeta2) * grad * grad;
  const double bc1 = 1.0 - std::pow(kBeta1, double(t));
  const double bc2 = 1.0 - std::pow(kBeta2, double(t));
  param -= step * (m / bc1) / (std::sqrt(v / bc2) + kEps);
}

struct EpochResult {
  double loss = 0.0;
  bool finite = true;
};

EpochResult run_epoch(MlpModel& model, AdamState& adam, const Mat& x, const std::vector<int>& y,
                      double weight_decay, double step, int batch_size, bool full_batch,
                      std::uint64_t shuffle_key) {
  EpochResult res;
  const Eigen::Index n = x.rows();
  if (full_batch) {
    const MlpGradient g = mlp_loss_gradient(model, x, y, weight_decay);
    if (!std::isfinite(g.loss)) return {g.loss, false};
    adam.t += 1;
    adam_update(model.w1, adam.m_w1, adam.v_w1, g.d_w1, step, adam.t);
    adam_update(model.b1, adam.m_b1, adam.v_b1, g.d_b1, step, adam.t);
    adam_update(model.w2, adam.m_w2, adam.v_w2, g.d_w2, step, adam.t);
    adam_update_scalar(model.b2, adam.m_b2, adam.v_b2, g.d_b2, step, adam.t);
    res.loss = g.loss;
    return res;
  }

  // Seeded shuffle, then fixed-size mini-batches (the ragged remainder is kept).
  std::vector<Eigen::Index> order(n);
  std::iota(order.begin(), order.end(), 0);
  RngStream rng(shuffle_key);
  for (Eigen::Index i = n - 1; i > 0; --i) {
    const auto j = static_cast<Eigen::Index>(rng.next_below(std::uint64_t(i) + 1));
    std::swap(order[i], order[j]);
  }
  double total = 0.0;
  Eigen::Index done = 0;
  while (done < n) {
    const Eigen::Index b = std::min<Eigen::Index>(batch_size, n - done);
    Mat xb(b, x.cols());
    std::vector<int> yb(b);
    for (Eigen::Index i = 0; i < b; ++i) {
      xb.row(i) = x.row(order[done + i]);
      yb[i] = y[order[done + i]];
    }
    const MlpGradient g = mlp_loss_gradient(model, xb, yb, weight_decay);
    if (!std::isfinite(g.loss)) return {g.loss, false};
    adam.t += 1;
    adam_update(model.w1, adam.m_w1, adam.v_w1, g.d_w1, step, adam.t);
    adam_update(model.b1, adam.m_b1, adam.v_b1, g.d_b1, step, adam.t);
    adam_update(model.w2, adam.m_w2, adam.v_w2, g.d_w2, step, adam.t);
    adam_update_scalar(model.b2, adam.m_b2, adam.v_b2, g.d_b2, step, adam.t);
    total += g.loss * double(b);
    done += b;
  }
  res.loss = total / double(n);
  return res;
}

struct GridRunResult {
  MlpModel best_model;
  double best_val_acc = -1.0;
  int epochs_run = 0;
  bool finite = true;
  std::vector<double> losses;
};

GridRunResult train_one(const MlpModel& init, const Mat& x_train, const std::vector<int>& y_train,
                        const Mat& x_val, const std::vector<int>& y_val,
                        const MlpTrainOptions& opts, double weight_decay, double step) {
  GridRunResult out;
  MlpModel model = init;
  AdamState adam(model);
  out.best_model = model;
  out.best_val_acc = label_accuracy(model, x_val, y_val);
  const bool full_batch = x_train.rows() <= opts.full_batch_threshold;
  int since_best = 0;
  for (int epoch = 0; epoch < opts.max_epochs; ++epoch) {
    const std::uint64_t shuffle_key = mix(mix(init.seed, 0x73687566), std::uint64_t(epoch));
    const EpochResult er = run_epoch(model, adam, x_train, y_train, weight_decay, step,
                                     opts.batch_size, full_batch, shuffle_key);
    if (!er.finite) {
      out.finite = false;
      return out;
    }
    out.losses.push_back(er.loss);
    out.epochs_run = epoch + 1;
    const double val_acc = label_accuracy(model, x_val, y_val);
    if (val_acc > out.best_val_acc) {
      out.best_val_acc = val_acc;
      out.best_model = model;
      since_best = 0;
    } else {
      ++since_best;
      if (since_best >= opts.patience) break;
    }
  }
  return out;
}

}  // namespace

MlpGradient mlp_loss_gradient(const MlpModel& model, const Mat& x, const std::vector<int>& y,
                              double weight_decay) {
  if (static_cast<Eigen::Index>(y.size()) != x.rows()) {
    throw InvalidArgument("mlp_loss_gradient: label count mismatch");
  }
  const Eigen::Index n = x.rows();
  Mat pre = (x * model.w1.transpose()).rowwise() + model.b1.transpose();
  Mat act = pre.cwiseMax(0.0);
  Vec logits = (act * model.w2).array() + model.b2;

  MlpGradient g;
  for (Eigen::Index i = 0; i < n; ++i) g.loss += bce_from_logit(logits(i), y[i]);
  g.loss /= double(n);
  g.loss += 0.5 * weight_decay *
            (model.w1.squaredNorm() + model.b1.squaredNorm() + model.w2.squaredNorm() +
             model.b2 * model.b2);

  Vec dlogit(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double s = 1.0 / (1.0 + std::exp(-logits(i)));
    dlogit(i) = (s - double(y[i])) / double(n);
  }
  g.d_w2 = act.transpose() * dlogit + weight_decay * model.w2;
  g.d_b2 = dlogit.sum() + weight_decay * model.b2;
  Mat dact = dlogit * model.w2.transpose();                       // n x H
  Mat dpre = (pre.array() > 0.0).select(dact, Mat::Zero(n, model.hidden_dim()));
  g.d_w1 = dpre.transpose() * x + weight_decay * model.w1;
  g.d_b1 = dpre.colwise().sum().transpose() + weight_decay * model.b1;
  return g;
}

MlpModel mlp_train(const MlpModel& init, const Mat& x_train, const std::vector<int>& y_train,
                   const Mat& x_val, const std::vector<int>& y_val, const MlpTrainOptions& opts,
                   MlpTrainReport* report) {
  if (x_train.rows() < 1 || x_val.rows() < 1) throw InvalidArgument("mlp_train: empty split");
  if (opts.weight_decay_grid.empty()) throw InvalidArgument("mlp_train: empty weight decay grid");

  MlpTrainReport rep;
  if (opts.max_epochs <= 0) {
    rep.trained = false;
    rep.best_val_accuracy = label_accuracy(init, x_val, y_val);
    if (report != nullptr) *report = rep;
    return init;
  }

  MlpModel best = init;
  double best_acc = -1.0;
  for (double wd : opts.weight_decay_grid) {
    GridRunResult run = train_one(init, x_train, y_train, x_val, y_val, opts, wd, opts.step);
    bool restarted = false;
    if (!run.finite) {  // one retry with a 10x smaller step
      run = train_one(init, x_train, y_train, x_val, y_val, opts, wd, 0.1 * opts.step);
      restarted = true;
      if (!run.finite) throw DataError("mlp_train: loss diverged even after step reduction");
    }
    if (run.best_val_acc > best_acc) {
      best_acc = run.best_val_acc;
      best = run.best_model;
      rep.chosen_weight_decay = wd;
      rep.best_val_accuracy = run.best_val_acc;
      rep.epochs_run = run.epochs_run;
      rep.train_losses = run.losses;
      rep.restarted = restarted;
    }
  }
  rep.trained = true;
  if (report != nullptr) *report = rep;
  return best;
}

std::string mlp_to_json(const MlpModel& model, const MlpTrainReport* report) {
  json j;
  j["hidden"] = model.hidden_dim();
  j["inputs"] = model.input_dim();
  j["activation"] = "relu";
  j["seed"] = model.seed;
  j["param_count"] = mlp_param_count(model);
  j["w1"] = std::vector<std::vector<double>>();
  for (int i = 0; i < model.hidden_dim(); ++i) {
    j["w1"].push_back(std::vector<double>(model.w1.row(i).begin(), model.w1.row(i).end()));
  }
  j["b1"] = std::vector<double>(model.b1.begin(), model.b1.end());
  j["w2"] = std::vector<double>(model.w2.begin(), model.w2.end());
  j["b2"] = model.b2;
  if (report != nullptr) {
    j["training"] = {{"trained", report->trained},
                     {"chosen_weight_decay", report->chosen_weight_decay},
                     {"best_val_accuracy", report->best_val_accuracy},
                     {"epochs_run", report->epochs_run},
                     {"restarted", report->restarted},
                     {"train_losses", report->train_losses}};
  }
  return j.dump(2);
}

MlpModel mlp_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw SchemaError(std::string("mlp JSON parse error: ") + e.what());
  }
  MlpModel m;
  try {
    const int hidden = j.at("hidden").get<int>();
    const int inputs = j.at("inputs").get<int>();
    m.seed = j.at("seed").get<std::uint64_t>();
    const auto w1 = j.at("w1").get<std::vector<std::vector<double>>>();
    if (static_cast<int>(w1.size()) != hidden) throw SchemaError("mlp JSON: w1 row count");
    m.w1.resize(hidden, inputs);
    for (int i = 0; i < hidden; ++i) {
      if (static_cast<int>(w1[i].size()) != inputs) throw SchemaError("mlp JSON: w1 column count");
      for (int k = 0; k < inputs; ++k) m.w1(i, k) = w1[i][k];
    }
    const auto b1 = j.at("b1").get<std::vector<double>>();
    const auto w2 = j.at("w2").get<std::vector<double>>();
    m.b1 = Eigen::Map<const Vec>(b1.data(), b1.size());
    m.w2 = Eigen::Map<const Vec>(w2.data(), w2.size());
    m.b2 = j.at("b2").get<double>();
  } catch (const json::exception& e) {
    throw SchemaError(std::string("mlp JSON missing field: ") + e.what());
  }
  return m;
}

}  // namespace cvqelm
