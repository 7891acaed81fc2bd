#pragma once

#include <cstdint>
#include <vector>

#include "collapse/rng.hpp"
#include "collapse/types.hpp"

namespace collapse {

struct TextWorldParams {
  std::uint64_t seed = 0;
  int vocab = 64;
  int order = 2;
  double dominant_min = 0.6;
  double dominant_max = 0.9;
  int tail = 16;
  double tail_concentration = 1.0;
  double zipf = 1.0;
  double opening_concentration = 0.5;
  int seq_len = 64;
  int real_pool = 800;
  int validation = 300;
  int anchors = 200;
};

// Ground-truth order-k chain standing in for natural text. Each context has
// one dominant continuation and a Dirichlet-weighted tail whose support is
// drawn from a Zipf prior over the vocabulary.
class TeacherChain {
 public:
  explicit TeacherChain(const TextWorldParams& p);

  const std::vector<double>& row(const TokenSequence& context) const;
  Corpus sample(std::size_t n, std::size_t len, Rng& rng) const;

 private:
  std::size_t index_of(const TokenSequence& context) const;

  int vocab_;
  int order_;
  std::vector<std::vector<double>> rows_;
};

struct TextDataset {
  Corpus real;
  Corpus validation;
  TextAnchors anchors;
  std::vector<double> train_freq;  // per-type counts over the real pool
};

TextDataset make_text_dataset(const TextWorldParams& p);

struct FeatureWorldParams {
  std::uint64_t seed = 0;
  int classes = 10;
  int dim = 8;
  double separation = 2.0;
  double noise = 1.0;
  double prior_zipf = 1.2;
  int low_support = 3;
  int real_pool = 800;
  int validation = 1000;
  int anchors = 200;
};

struct FeatureDataset {
  LabeledSet real;
  LabeledSet validation;
  FeatureAnchors anchors;
  std::vector<int> low_support;  // classes with the smallest priors
  LabeledSet tail_eval;          // validation examples of low-support classes
  std::vector<double> priors;
};

FeatureDataset make_feature_dataset(const FeatureWorldParams& p);

// Weighted sampling of k distinct indices (sequential draws).
std::vector<std::size_t> weighted_without_replacement(const std::vector<double>& w, std::size_t k,
                                                      Rng& rng);

}  // namespace collapse
