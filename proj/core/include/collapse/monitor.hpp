#pragma once

#include <optional>
#include <vector>

#include "collapse/markov_learner.hpp"
#include "collapse/softmax_classifier.hpp"
#include "collapse/sources.hpp"
#include "collapse/types.hpp"

namespace collapse {

struct MonitorConfig {
  int window = 1;
  double epsilon = 1e-8;
  double rare_percentile = 10.0;
  int ece_bins = 15;
  double tail_threshold = 0.1;

  void validate() const;
};

struct TrajectorySnapshot {
  int g = 0;
  double H = 0.0;
  std::optional<double> S;
  double ppl = 1.0;
  std::optional<double> rare_token_mass;
  std::optional<double> tail_coverage;
  double ece = 0.0;
  std::vector<double> z;

  bool operator==(const TrajectorySnapshot&) const = default;
};

double anchor_entropy(const MarkovTextLearner& learner, const TextAnchors& anchors);
double anchor_entropy(const SoftmaxClassifierLearner& learner, const FeatureAnchors& anchors);

// z_history[i] is z_i; evaluates S_g over window W.
double drift(const std::vector<std::vector<double>>& z_history, int g, int window, double epsilon);

double perplexity(const MarkovTextLearner& learner, const Corpus& validation);
// exp of mean cross-entropy against hard labels
double perplexity(const SoftmaxClassifierLearner& learner, const LabeledSet& validation);

// Linear-interpolated percentile (0..100) of the given values.
double percentile(std::vector<double> values, double pct);

double rare_token_mass(const Corpus& sample, const std::vector<double>& train_freq, double pct);

double tail_coverage(const SoftmaxClassifierLearner& learner, const LabeledSet& eval,
                     const std::vector<int>& low_support, double threshold);
double tail_coverage(const std::vector<std::vector<double>>& predictions,
                     const std::vector<int>& low_support, double threshold);

double ece(const std::vector<std::vector<double>>& predictions, const std::vector<int>& labels, int bins);

// Next-token predictions at every validation position, paired with the
// observed tokens.
std::pair<std::vector<std::vector<double>>, std::vector<int>> next_token_predictions(
    const MarkovTextLearner& learner, const Corpus& validation);

TrajectorySnapshot snapshot_all(const MarkovTextLearner& learner, const TextDataset& data,
                                const Corpus& generated, const MonitorConfig& cfg,
                                const std::vector<std::vector<double>>& z_history, int g);

TrajectorySnapshot snapshot_all(const SoftmaxClassifierLearner& learner, const FeatureDataset& data,
                                const MonitorConfig& cfg,
                                const std::vector<std::vector<double>>& z_history, int g);

}  // namespace collapse
