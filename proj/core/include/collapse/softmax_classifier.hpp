#pragma once

#include <vector>

#include "collapse/types.hpp"

namespace collapse {

struct Gradient {
  std::vector<double> weights;  // row-major C x d
  std::vector<double> bias;
  double loss = 0.0;
};

// Linear softmax classifier trained by full-batch gradient descent on mean
// cross-entropy against hard or soft targets.
class SoftmaxClassifierLearner {
 public:
  SoftmaxClassifierLearner(int classes, int dim, double learning_rate);

  int classes() const { return classes_; }
  int dim() const { return dim_; }
  double learning_rate() const { return lr_; }

  std::vector<double>& weights() { return w_; }
  const std::vector<double>& weights() const { return w_; }
  std::vector<double>& bias() { return b_; }
  const std::vector<double>& bias() const { return b_; }

  std::vector<double> logits(const std::vector<double>& x) const;
  std::vector<double> predict_dist(const std::vector<double>& x) const;

  // Mean cross-entropy and its analytic gradient (p - y) x^T.
  Gradient loss_and_gradient(const LabeledSet& data) const;
  double loss(const LabeledSet& data) const;

  void train(const LabeledSet& data, int steps);

  // Mean anchor logit vector.
  std::vector<double> representation(const FeatureAnchors& anchors) const;

  bool finite() const;
  bool operator==(const SoftmaxClassifierLearner& o) const = default;

 private:
  void check(const LabeledSet& data) const;
  void check_features(const std::vector<double>& x) const;

  int classes_;
  int dim_;
  double lr_;
  std::vector<double> w_;
  std::vector<double> b_;
};

std::vector<double> target_of(const FeatureExample& ex, int classes);

}  // namespace collapse
