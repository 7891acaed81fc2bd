#pragma once

#include <cstdint>
#include <map>
#include <unordered_map>
#include <vector>

#include "collapse/rng.hpp"
#include "collapse/types.hpp"

namespace collapse {

struct GenerateOptions {
  std::size_t n = 1;
  std::size_t max_len = 64;
  double top_p = 0.9;
  double temperature = 0.7;
  // Leading tokens drawn from the untempered, untruncated distribution.
  std::size_t prompt_tokens = 0;
};

// Order-k token model with interpolated backoff smoothing:
//   p_j(w | c_j) = (n_j(c_j, w) + lambda V p_{j-1}(w | c_{j-1})) / (n_j(c_j) + lambda V)
// down to p_{-1} = 1/V. Contexts shorter than k are left-padded with BOS = V.
class MarkovTextLearner {
 public:
  MarkovTextLearner(int vocab, int order, double smoothing);

  int vocab() const { return vocab_; }
  int order() const { return order_; }
  double smoothing() const { return smoothing_; }
  int bos() const { return vocab_; }
  bool trained() const { return trained_; }

  // Accumulates k-gram counts, each occurrence weighted by `epochs`.
  void train(const Corpus& data, int epochs = 1);
  // Multiplies every stored count by `retention` in [0, 1].
  void decay(double retention);

  std::vector<double> predict_dist(const TokenSequence& context) const;
  const std::vector<double>& row(std::uint64_t full_key) const;

  Corpus generate(const GenerateOptions& opt, Rng& rng) const;

  // Mean predicted next-token distribution over anchors.
  std::vector<double> representation(const TextAnchors& anchors) const;

  // Sum of log p over every position of every sequence, and the token count.
  std::pair<double, std::size_t> log_likelihood(const Corpus& data) const;

  // Encoded key of the last `len` tokens of a (padded) context.
  std::uint64_t key_of(const TokenSequence& context, int len) const;
  std::uint64_t push_key(std::uint64_t key, Token t) const;
  std::uint64_t start_key() const;

  struct Table {
    std::vector<double> counts;
    double total = 0.0;
  };
  // counts_[j] holds order-j contexts (j = 0..k).
  const std::vector<std::map<std::uint64_t, Table>>& tables() const { return counts_; }
  void set_tables(std::vector<std::map<std::uint64_t, Table>> tables, bool trained);

  bool operator==(const MarkovTextLearner& o) const;

 private:
  void check_token(Token t) const;
  std::vector<double> compute_row(std::uint64_t full_key) const;
  void invalidate() const { cache_.clear(); }

  int vocab_;
  int order_;
  double smoothing_;
  bool trained_ = false;
  std::uint64_t modulus_ = 1;  // (V+1)^k
  std::vector<std::map<std::uint64_t, Table>> counts_;
  mutable std::unordered_map<std::uint64_t, std::vector<double>> cache_;
};

bool operator==(const MarkovTextLearner::Table& a, const MarkovTextLearner::Table& b);

}  // namespace collapse
