#include <cmath>

#include "collapse/error.hpp"
#include "collapse/sampling.hpp"
#include "collapse/sources.hpp"

namespace collapse {

std::vector<std::size_t> weighted_without_replacement(const std::vector<double>& w, std::size_t k,
                                                      Rng& rng) {
  if (k > w.size()) fail(ErrorKind::invalid_parameter, "cannot draw more items than available");
  std::vector<double> rem = w;
  std::vector<std::size_t> out;
  out.reserve(k);
  for (std::size_t i = 0; i < k; ++i) {
    double total = 0.0;
    for (double x : rem) total += x;
    const double u = rng.uniform() * total;
    double cum = 0.0;
    std::size_t j = rem.size();
    for (std::size_t t = 0; t < rem.size(); ++t) {
      if (rem[t] <= 0.0) continue;
      cum += rem[t];
      j = t;
      if (cum > u) break;
    }
    if (j == rem.size()) fail(ErrorKind::invalid_parameter, "not enough positive weights");
    out.push_back(j);
    rem[j] = 0.0;
  }
  return out;
}

TeacherChain::TeacherChain(const TextWorldParams& p) : vocab_(p.vocab), order_(p.order) {
  if (p.vocab < 2 || p.order < 1) fail(ErrorKind::invalid_parameter, "text world needs V >= 2, k >= 1");
  if (p.tail < 0 || p.tail + 1 > p.vocab) fail(ErrorKind::invalid_parameter, "world.tail must be in [0, V-1]");
  if (!(p.dominant_min > 0.0 && p.dominant_min <= p.dominant_max && p.dominant_max <= 1.0))
    fail(ErrorKind::invalid_parameter, "world dominant range must satisfy 0 < min <= max <= 1");
  Rng rng = Rng::derive(p.seed, 0x7ea);
  std::vector<double> prior(static_cast<std::size_t>(vocab_));
  for (int i = 0; i < vocab_; ++i) prior[static_cast<std::size_t>(i)] = 1.0 / std::pow(i + 1.0, p.zipf);

  std::size_t n_ctx = 1;
  for (int i = 0; i < order_; ++i) n_ctx *= static_cast<std::size_t>(vocab_) + 1;
  rows_.resize(n_ctx);
  const std::vector<double> tail_alpha(static_cast<std::size_t>(p.tail), p.tail_concentration);
  for (auto& row : rows_) {
    row.assign(static_cast<std::size_t>(vocab_), 0.0);
    const auto sup = weighted_without_replacement(prior, static_cast<std::size_t>(p.tail) + 1, rng);
    const double d = p.tail == 0 ? 1.0 : rng.uniform(p.dominant_min, p.dominant_max);
    row[sup[0]] = d;
    if (p.tail > 0) {
      const auto w = rng.dirichlet(tail_alpha);
      for (std::size_t i = 0; i < w.size(); ++i) row[sup[i + 1]] = w[i] * (1.0 - d);
    }
  }
  // Sequence openings: a broad but uneven distribution over the vocabulary.
  rows_[n_ctx - 1] = rng.dirichlet(std::vector<double>(static_cast<std::size_t>(vocab_), p.opening_concentration));
}

std::size_t TeacherChain::index_of(const TokenSequence& context) const {
  std::size_t idx = 0;
  const auto n = static_cast<long>(context.size());
  for (long i = n - order_; i < n; ++i) {
    const Token t = i < 0 ? vocab_ : context[static_cast<std::size_t>(i)];
    idx = idx * (static_cast<std::size_t>(vocab_) + 1) + static_cast<std::size_t>(t);
  }
  return idx;
}

const std::vector<double>& TeacherChain::row(const TokenSequence& context) const {
  return rows_[index_of(context)];
}

Corpus TeacherChain::sample(std::size_t n, std::size_t len, Rng& rng) const {
  Corpus c;
  c.origin = Origin::real;
  c.sequences.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    TokenSequence s;
    s.reserve(len);
    for (std::size_t t = 0; t < len; ++t) s.push_back(static_cast<Token>(sample_index(row(s), rng)));
    c.sequences.push_back(std::move(s));
  }
  return c;
}

TextDataset make_text_dataset(const TextWorldParams& p) {
  if (p.seq_len < 2) fail(ErrorKind::invalid_parameter, "run.seq_len must be at least 2");
  if (p.real_pool < 1 || p.validation < 1 || p.anchors < 1)
    fail(ErrorKind::invalid_parameter, "pool, validation and anchor sizes must be positive");
  const TeacherChain world(p);
  Rng rng = Rng::derive(p.seed, 0xda7a);
  const auto len = static_cast<std::size_t>(p.seq_len);
  TextDataset ds;
  ds.real = world.sample(static_cast<std::size_t>(p.real_pool), len, rng);
  ds.validation = world.sample(static_cast<std::size_t>(p.validation), len, rng);
  const Corpus prefixes = world.sample(static_cast<std::size_t>(p.anchors), len, rng);
  const std::size_t min_cut = std::min<std::size_t>(static_cast<std::size_t>(p.order), len - 1);
  for (const auto& s : prefixes.sequences) {
    const std::size_t cut = min_cut + rng.index(len - min_cut);
    ds.anchors.items.emplace_back(s.begin(), s.begin() + static_cast<long>(cut));
  }
  ds.train_freq.assign(static_cast<std::size_t>(p.vocab), 0.0);
  for (const auto& s : ds.real.sequences)
    for (Token t : s) ds.train_freq[static_cast<std::size_t>(t)] += 1.0;
  return ds;
}

}  // namespace collapse
