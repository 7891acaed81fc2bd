#include "collapse/softmax_classifier.hpp"

#include <algorithm>
#include <cmath>

#include "collapse/error.hpp"

namespace collapse {

namespace {

std::vector<double> softmax(const std::vector<double>& z) {
  const double m = *std::max_element(z.begin(), z.end());
  std::vector<double> p(z.size());
  double s = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    p[i] = std::exp(z[i] - m);
    s += p[i];
  }
  for (double& x : p) x /= s;
  return p;
}

}  // namespace

SoftmaxClassifierLearner::SoftmaxClassifierLearner(int classes, int dim, double learning_rate)
    : classes_(classes), dim_(dim), lr_(learning_rate) {
  if (classes < 2) fail(ErrorKind::invalid_parameter, "classifier needs at least two classes");
  if (dim < 1) fail(ErrorKind::invalid_parameter, "feature dimension must be positive");
  if (!(learning_rate > 0.0)) fail(ErrorKind::invalid_parameter, "learning rate must be positive");
  w_.assign(static_cast<std::size_t>(classes) * static_cast<std::size_t>(dim), 0.0);
  b_.assign(static_cast<std::size_t>(classes), 0.0);
}

std::vector<double> target_of(const FeatureExample& ex, int classes) {
  if (ex.label.has_value() == ex.soft.has_value())
    fail(ErrorKind::malformed_input, "example must carry exactly one of hard or soft label");
  if (ex.label) {
    if (*ex.label < 0 || *ex.label >= classes)
      fail(ErrorKind::malformed_input, "label " + std::to_string(*ex.label) + " out of range");
    std::vector<double> y(static_cast<std::size_t>(classes), 0.0);
    y[static_cast<std::size_t>(*ex.label)] = 1.0;
    return y;
  }
  if (ex.soft->size() != static_cast<std::size_t>(classes))
    fail(ErrorKind::malformed_input, "soft label length does not match class count");
  return *ex.soft;
}

void SoftmaxClassifierLearner::check_features(const std::vector<double>& x) const {
  if (x.size() != static_cast<std::size_t>(dim_))
    fail(ErrorKind::malformed_input, "feature dimension " + std::to_string(x.size()) +
                                         " does not match " + std::to_string(dim_));
}

void SoftmaxClassifierLearner::check(const LabeledSet& data) const {
  for (const auto& ex : data.examples) {
    check_features(ex.features);
    (void)target_of(ex, classes_);
  }
}

std::vector<double> SoftmaxClassifierLearner::logits(const std::vector<double>& x) const {
  check_features(x);
  std::vector<double> z(b_);
  for (int c = 0; c < classes_; ++c) {
    const double* wr = &w_[static_cast<std::size_t>(c) * static_cast<std::size_t>(dim_)];
    double s = 0.0;
    for (int j = 0; j < dim_; ++j) s += wr[j] * x[static_cast<std::size_t>(j)];
    z[static_cast<std::size_t>(c)] += s;
  }
  return z;
}

std::vector<double> SoftmaxClassifierLearner::predict_dist(const std::vector<double>& x) const {
  return softmax(logits(x));
}

Gradient SoftmaxClassifierLearner::loss_and_gradient(const LabeledSet& data) const {
  if (data.empty()) fail(ErrorKind::empty_data, "training set is empty");
  check(data);
  Gradient g;
  g.weights.assign(w_.size(), 0.0);
  g.bias.assign(b_.size(), 0.0);
  for (const auto& ex : data.examples) {
    const auto z = logits(ex.features);
    const double m = *std::max_element(z.begin(), z.end());
    double s = 0.0;
    for (double v : z) s += std::exp(v - m);
    const double lse = m + std::log(s);
    const auto y = target_of(ex, classes_);
    for (int c = 0; c < classes_; ++c) {
      const auto cu = static_cast<std::size_t>(c);
      const double p = std::exp(z[cu] - lse);
      g.loss -= y[cu] * (z[cu] - lse);
      const double r = p - y[cu];
      g.bias[cu] += r;
      double* gw = &g.weights[cu * static_cast<std::size_t>(dim_)];
      for (int j = 0; j < dim_; ++j) gw[j] += r * ex.features[static_cast<std::size_t>(j)];
    }
  }
  const double inv = 1.0 / static_cast<double>(data.size());
  g.loss *= inv;
  for (double& v : g.weights) v *= inv;
  for (double& v : g.bias) v *= inv;
  return g;
}

double SoftmaxClassifierLearner::loss(const LabeledSet& data) const {
  return loss_and_gradient(data).loss;
}

void SoftmaxClassifierLearner::train(const LabeledSet& data, int steps) {
  if (steps < 0) fail(ErrorKind::invalid_parameter, "steps must be nonnegative");
  if (steps == 0) return;
  if (data.empty()) fail(ErrorKind::empty_data, "training set is empty");
  check(data);
  for (int s = 0; s < steps; ++s) {
    const Gradient g = loss_and_gradient(data);
    for (std::size_t i = 0; i < w_.size(); ++i) w_[i] -= lr_ * g.weights[i];
    for (std::size_t i = 0; i < b_.size(); ++i) b_[i] -= lr_ * g.bias[i];
  }
  if (!finite()) fail(ErrorKind::numerical_divergence, "classifier parameters are not finite");
}

std::vector<double> SoftmaxClassifierLearner::representation(const FeatureAnchors& anchors) const {
  if (anchors.items.empty()) fail(ErrorKind::empty_data, "anchor set is empty");
  std::vector<double> z(static_cast<std::size_t>(classes_), 0.0);
  for (const auto& a : anchors.items) {
    const auto l = logits(a);
    for (std::size_t c = 0; c < z.size(); ++c) z[c] += l[c];
  }
  for (double& v : z) v /= static_cast<double>(anchors.items.size());
  return z;
}

bool SoftmaxClassifierLearner::finite() const {
  auto ok = [](double v) { return std::isfinite(v); };
  return std::all_of(w_.begin(), w_.end(), ok) && std::all_of(b_.begin(), b_.end(), ok);
}

}  // namespace collapse
