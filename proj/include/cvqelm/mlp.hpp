#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cvqelm/gaussian.hpp"

namespace cvqelm {

// Single-hidden-layer MLP baseline trained on standardized inputs with
// L2-regularised cross-entropy, an adaptive per-parameter step rule, early
// stopping on validation accuracy, and a grid search over weight decay.
// Everything is deterministic given (seed, data, options).

enum class Activation { Relu };

struct MlpModel {
  Mat w1;       // H x F
  Vec b1;       // H
  Vec w2;       // H
  double b2 = 0.0;
  Activation activation = Activation::Relu;
  std::uint64_t seed = 0;

  int input_dim() const { return static_cast<int>(w1.cols()); }
  int hidden_dim() const { return static_cast<int>(w1.rows()); }
};

/// Trainable parameter count H(F+2)+1.
int mlp_param_count(int input_dim, int hidden_dim);
int mlp_param_count(const MlpModel& model);

/// Fan-in-scaled uniform initialization from a counter-based stream.
MlpModel mlp_init(int input_dim, int hidden_dim, std::uint64_t seed);

struct MlpTrainOptions {
  std::vector<double> weight_decay_grid = {1e-4, 1e-3, 1e-2};
  double step = 1e-3;
  int max_epochs = 500;
  int patience = 20;
  int batch_size = 256;            // used above the full-batch threshold
  int full_batch_threshold = 10000;
};

struct MlpTrainReport {
  bool trained = false;            // false when the epoch budget was zero
  double chosen_weight_decay = 0.0;
  double best_val_accuracy = 0.0;
  int epochs_run = 0;              // for the chosen grid member
  bool restarted = false;          // divergence triggered the one retry
  std::vector<double> train_losses;  // per epoch, chosen grid member
};

/// Train on (x_train, y_train) selecting weight decay by validation accuracy;
/// returns the best early-stopping checkpoint.
MlpModel mlp_train(const MlpModel& init, const Mat& x_train, const std::vector<int>& y_train,
                   const Mat& x_val, const std::vector<int>& y_val, const MlpTrainOptions& opts,
                   MlpTrainReport* report = nullptr);

Vec mlp_logits(const MlpModel& model, const Mat& x);
std::vector<int> mlp_predict(const MlpModel& model, const Mat& x);

/// Mean cross-entropy plus (wd/2)||theta||^2 and its gradient, for tests and
/// the optimizer.
struct MlpGradient {
  double loss = 0.0;
  Mat d_w1;
  Vec d_b1;
  Vec d_w2;
  double d_b2 = 0.0;
};
MlpGradient mlp_loss_gradient(const MlpModel& model, const Mat& x, const std::vector<int>& y,
                              double weight_decay);

std::string mlp_to_json(const MlpModel& model, const MlpTrainReport* report = nullptr);
MlpModel mlp_from_json(const std::string& text);

}  // namespace cvqelm
