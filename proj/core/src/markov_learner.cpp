#include "collapse/markov_learner.hpp"

#include <cmath>

#include "collapse/error.hpp"
#include "collapse/sampling.hpp"

namespace collapse {

MarkovTextLearner::MarkovTextLearner(int vocab, int order, double smoothing)
    : vocab_(vocab), order_(order), smoothing_(smoothing) {
  if (vocab < 1) fail(ErrorKind::invalid_parameter, "vocabulary size must be positive");
  if (order < 1) fail(ErrorKind::invalid_parameter, "order must be positive");
  if (!(smoothing > 0.0)) fail(ErrorKind::invalid_parameter, "smoothing must be positive");
  const auto base = static_cast<std::uint64_t>(vocab) + 1;
  for (int i = 0; i < order; ++i) {
    if (modulus_ > UINT64_MAX / base) fail(ErrorKind::invalid_parameter, "order too large for vocabulary");
    modulus_ *= base;
  }
  counts_.resize(static_cast<std::size_t>(order) + 1);
}

void MarkovTextLearner::check_token(Token t) const {
  if (t < 0 || t >= vocab_)
    fail(ErrorKind::malformed_input, "token id " + std::to_string(t) + " outside vocabulary of " +
                                         std::to_string(vocab_));
}

std::uint64_t MarkovTextLearner::start_key() const {
  std::uint64_t key = 0;
  for (int i = 0; i < order_; ++i) key = push_key(key, bos());
  return key;
}

std::uint64_t MarkovTextLearner::push_key(std::uint64_t key, Token t) const {
  return (key * (static_cast<std::uint64_t>(vocab_) + 1) + static_cast<std::uint64_t>(t)) % modulus_;
}

std::uint64_t MarkovTextLearner::key_of(const TokenSequence& context, int len) const {
  std::uint64_t key = 0;
  const auto base = static_cast<std::uint64_t>(vocab_) + 1;
  const auto n = static_cast<long>(context.size());
  for (long i = n - len; i < n; ++i) {
    const Token t = i < 0 ? bos() : context[static_cast<std::size_t>(i)];
    key = key * base + static_cast<std::uint64_t>(t);
  }
  return key;
}

void MarkovTextLearner::train(const Corpus& data, int epochs) {
  if (data.empty()) fail(ErrorKind::empty_data, "training corpus is empty");
  if (epochs < 1) fail(ErrorKind::invalid_parameter, "epochs must be positive");
  for (const auto& seq : data.sequences)
    for (Token t : seq) check_token(t);

  const double w = static_cast<double>(epochs);
  const auto base = static_cast<std::uint64_t>(vocab_) + 1;
  for (const auto& seq : data.sequences) {
    std::uint64_t key = start_key();
    for (Token t : seq) {
      std::uint64_t sub = key;
      std::uint64_t mod = modulus_;
      for (int j = order_; j >= 0; --j) {
        Table& tab = counts_[static_cast<std::size_t>(j)][sub];
        if (tab.counts.empty()) tab.counts.assign(static_cast<std::size_t>(vocab_), 0.0);
        tab.counts[static_cast<std::size_t>(t)] += w;
        tab.total += w;
        if (j > 0) {
          mod /= base;
          sub %= mod;
        }
      }
      key = push_key(key, t);
    }
  }
  trained_ = true;
  invalidate();
}

void MarkovTextLearner::decay(double retention) {
  if (!(retention >= 0.0 && retention <= 1.0))
    fail(ErrorKind::invalid_parameter, "retention must be in [0, 1]");
  if (retention == 1.0) return;
  for (auto& level : counts_)
    for (auto& [key, tab] : level) {
      for (double& c : tab.counts) c *= retention;
      tab.total *= retention;
    }
  invalidate();
}

std::vector<double> MarkovTextLearner::compute_row(std::uint64_t full_key) const {
  const double lv = smoothing_ * vocab_;
  std::vector<double> p(static_cast<std::size_t>(vocab_), 1.0 / vocab_);
  const auto base = static_cast<std::uint64_t>(vocab_) + 1;
  std::vector<std::uint64_t> subkeys(static_cast<std::size_t>(order_) + 1);
  std::uint64_t mod = modulus_;
  std::uint64_t sub = full_key;
  for (int j = order_; j >= 0; --j) {
    subkeys[static_cast<std::size_t>(j)] = sub;
    if (j > 0) {
      mod /= base;
      sub %= mod;
    }
  }
  for (int j = 0; j <= order_; ++j) {
    const auto& level = counts_[static_cast<std::size_t>(j)];
    auto it = level.find(subkeys[static_cast<std::size_t>(j)]);
    if (it == level.end() || it->second.total <= 0.0) continue;
    const Table& tab = it->second;
    const double denom = tab.total + lv;
    for (std::size_t w = 0; w < p.size(); ++w) p[w] = (tab.counts[w] + lv * p[w]) / denom;
  }
  return p;
}

const std::vector<double>& MarkovTextLearner::row(std::uint64_t full_key) const {
  auto it = cache_.find(full_key);
  if (it != cache_.end()) return it->second;
  return cache_.emplace(full_key, compute_row(full_key)).first->second;
}

std::vector<double> MarkovTextLearner::predict_dist(const TokenSequence& context) const {
  for (Token t : context) check_token(t);
  return row(key_of(context, order_));
}

Corpus MarkovTextLearner::generate(const GenerateOptions& opt, Rng& rng) const {
  if (!trained_) fail(ErrorKind::not_ready, "learner has not been trained");
  if (opt.n < 1 || opt.max_len < 1) fail(ErrorKind::invalid_parameter, "n and max_len must be positive");
  std::unordered_map<std::uint64_t, std::vector<double>> filtered;
  Corpus out;
  out.origin = Origin::synthetic;
  out.sequences.reserve(opt.n);
  for (std::size_t i = 0; i < opt.n; ++i) {
    TokenSequence seq;
    seq.reserve(opt.max_len);
    std::uint64_t key = start_key();
    for (std::size_t t = 0; t < opt.max_len; ++t) {
      const std::vector<double>* dist;
      if (t < opt.prompt_tokens) {
        dist = &row(key);
      } else {
        auto it = filtered.find(key);
        if (it == filtered.end())
          it = filtered.emplace(key, sampling_distribution(row(key), opt.top_p, opt.temperature)).first;
        dist = &it->second;
      }
      const auto tok = static_cast<Token>(sample_index(*dist, rng));
      seq.push_back(tok);
      key = push_key(key, tok);
    }
    out.sequences.push_back(std::move(seq));
  }
  return out;
}

std::vector<double> MarkovTextLearner::representation(const TextAnchors& anchors) const {
  if (anchors.items.empty()) fail(ErrorKind::empty_data, "anchor set is empty");
  std::vector<double> z(static_cast<std::size_t>(vocab_), 0.0);
  for (const auto& a : anchors.items) {
    const auto p = predict_dist(a);
    for (std::size_t w = 0; w < z.size(); ++w) z[w] += p[w];
  }
  for (double& x : z) x /= static_cast<double>(anchors.items.size());
  return z;
}

std::pair<double, std::size_t> MarkovTextLearner::log_likelihood(const Corpus& data) const {
  double ll = 0.0;
  std::size_t n = 0;
  for (const auto& seq : data.sequences) {
    std::uint64_t key = start_key();
    for (Token t : seq) {
      check_token(t);
      ll += std::log(row(key)[static_cast<std::size_t>(t)]);
      ++n;
      key = push_key(key, t);
    }
  }
  return {ll, n};
}

void MarkovTextLearner::set_tables(std::vector<std::map<std::uint64_t, Table>> tables, bool trained) {
  if (tables.size() != static_cast<std::size_t>(order_) + 1)
    fail(ErrorKind::decode, "count table depth does not match order");
  for (const auto& level : tables)
    for (const auto& [key, tab] : level) {
      if (key >= modulus_ || tab.counts.size() != static_cast<std::size_t>(vocab_))
        fail(ErrorKind::decode, "count table entry does not match vocabulary");
      for (double c : tab.counts)
        if (!(c >= 0.0) || !std::isfinite(c)) fail(ErrorKind::decode, "invalid count");
    }
  counts_ = std::move(tables);
  trained_ = trained;
  invalidate();
}

bool operator==(const MarkovTextLearner::Table& a, const MarkovTextLearner::Table& b) {
  return a.total == b.total && a.counts == b.counts;
}

bool MarkovTextLearner::operator==(const MarkovTextLearner& o) const {
  return vocab_ == o.vocab_ && order_ == o.order_ && smoothing_ == o.smoothing_ &&
         trained_ == o.trained_ && counts_ == o.counts_;
}

}  // namespace collapse
