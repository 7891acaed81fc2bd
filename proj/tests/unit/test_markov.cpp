#include <gtest/gtest.h>

#include <cmath>
#include <map>

#include "collapse/error.hpp"
#include "collapse/markov_learner.hpp"
#include "collapse/sampling.hpp"
#include "stat_util.hpp"

using namespace collapse;

namespace {

Corpus corpus(std::vector<TokenSequence> seqs) {
  Corpus c;
  c.sequences = std::move(seqs);
  return c;
}

Corpus random_corpus(Rng& rng, int vocab, std::size_t n, std::size_t len) {
  Corpus c;
  for (std::size_t i = 0; i < n; ++i) {
    TokenSequence s;
    for (std::size_t t = 0; t < len; ++t) s.push_back(static_cast<Token>(rng.index(vocab)));
    c.sequences.push_back(std::move(s));
  }
  return c;
}

}  // namespace

TEST(Markov, HandComputedBackoff) {
  const double lam = 0.1;
  MarkovTextLearner m(2, 1, lam);
  m.train(corpus({{0, 1}}));
  // unigram row is (0.5, 0.5); bigram context {0} saw only token 1
  const auto p = m.predict_dist({0});
  EXPECT_NEAR(p[0], lam / (1 + 2 * lam), 1e-15);
  EXPECT_NEAR(p[1], (1 + lam) / (1 + 2 * lam), 1e-15);
  // unseen context {1} falls back to the unigram row
  const auto q = m.predict_dist({1});
  EXPECT_NEAR(q[0], 0.5, 1e-15);
  // empty context is the BOS row: saw token 0 once
  const auto b = m.predict_dist({});
  EXPECT_NEAR(b[0], (1 + lam) / (1 + 2 * lam), 1e-15);
}

TEST(Markov, UntrainedPredictsUniform) {
  MarkovTextLearner m(5, 2, 0.01);
  for (double x : m.predict_dist({1, 2})) EXPECT_DOUBLE_EQ(x, 0.2);
  EXPECT_FALSE(m.trained());
}

TEST(Markov, RejectsOutOfVocabularyTokens) {
  MarkovTextLearner m(4, 2, 0.01);
  try {
    m.train(corpus({{0, 1}, {2, 7}}));
    FAIL() << "expected malformed_input";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::malformed_input);
  }
  // validation happens before any count is touched
  EXPECT_FALSE(m.trained());
  EXPECT_THROW(m.train(corpus({{-1}})), Error);
  EXPECT_THROW(m.predict_dist({9}), Error);
}

TEST(Markov, RejectsEmptyCorpusAndBadParameters) {
  MarkovTextLearner m(4, 2, 0.01);
  try {
    m.train(Corpus{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::empty_data);
  }
  EXPECT_THROW(MarkovTextLearner(0, 2, 0.1), Error);
  EXPECT_THROW(MarkovTextLearner(4, 0, 0.1), Error);
  EXPECT_THROW(MarkovTextLearner(4, 2, 0.0), Error);
  EXPECT_THROW(m.decay(1.5), Error);
}

TEST(Markov, GenerateRequiresTraining) {
  MarkovTextLearner m(4, 2, 0.01);
  Rng rng(0);
  try {
    m.generate({}, rng);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::not_ready);
  }
}

TEST(Markov, GenerateMatchesSamplingDistribution) {
  Rng data_rng(3);
  MarkovTextLearner m(6, 1, 0.05);
  m.train(random_corpus(data_rng, 6, 50, 8));
  GenerateOptions opt;
  opt.n = 40000;
  opt.max_len = 1;
  opt.top_p = 0.95;
  opt.temperature = 0.8;
  Rng rng(17);
  const Corpus out = m.generate(opt, rng);
  std::vector<double> counts(6, 0.0);
  for (const auto& s : out.sequences) counts[static_cast<std::size_t>(s[0])] += 1.0;
  const auto expect = sampling_distribution(m.predict_dist({}), opt.top_p, opt.temperature);
  int df = 0;
  const double x2 = test::chi2_stat(counts, expect, static_cast<double>(opt.n), &df);
  for (std::size_t i = 0; i < expect.size(); ++i)
    if (expect[i] == 0.0) EXPECT_EQ(counts[i], 0.0);
  ASSERT_GT(df, 0);
  EXPECT_LT(x2, test::chi2_critical_99(df));
}

TEST(Markov, SecondTokenFollowsConditional) {
  MarkovTextLearner m(3, 1, 0.01);
  m.train(corpus({{0, 1}, {0, 2}, {0, 2}, {1, 0}}));
  GenerateOptions opt;
  opt.n = 30000;
  opt.max_len = 2;
  opt.top_p = 1.0;
  opt.temperature = 1.0;
  Rng rng(2);
  const Corpus out = m.generate(opt, rng);
  std::vector<double> counts(3, 0.0);
  double n = 0;
  for (const auto& s : out.sequences)
    if (s[0] == 0) {
      counts[static_cast<std::size_t>(s[1])] += 1.0;
      n += 1.0;
    }
  int df = 0;
  const double x2 = test::chi2_stat(counts, m.predict_dist({0}), n, &df);
  EXPECT_LT(x2, test::chi2_critical_99(df));
}

TEST(Markov, GenerateIsSeedDeterministic) {
  Rng data_rng(1);
  MarkovTextLearner m(8, 2, 0.01);
  m.train(random_corpus(data_rng, 8, 30, 10));
  GenerateOptions opt;
  opt.n = 20;
  opt.max_len = 12;
  Rng a(5), b(5);
  EXPECT_EQ(m.generate(opt, a).sequences, m.generate(opt, b).sequences);
}

TEST(Markov, RowsAreNormalizedProperty) {
  Rng gen(123);
  for (int trial = 0; trial < 30; ++trial) {
    const int vocab = 2 + static_cast<int>(gen.index(10));
    const int order = 1 + static_cast<int>(gen.index(3));
    MarkovTextLearner m(vocab, order, 1e-4 + gen.uniform());
    m.train(random_corpus(gen, vocab, 1 + gen.index(20), 1 + gen.index(10)));
    if (gen.uniform() < 0.5) m.decay(gen.uniform());
    for (int q = 0; q < 10; ++q) {
      const auto ctx = random_corpus(gen, vocab, 1, gen.index(5)).sequences[0];
      const auto p = m.predict_dist(ctx);
      EXPECT_LT(normalization_error(p), 1e-12);
      for (double x : p) EXPECT_GT(x, 0.0);
    }
  }
}

TEST(Markov, DecayScalesCounts) {
  MarkovTextLearner m(3, 1, 0.01);
  m.train(corpus({{0, 1, 2}}), 2);
  m.decay(0.25);
  const auto& t = m.tables()[0].begin()->second;
  EXPECT_DOUBLE_EQ(t.total, 1.5);
  EXPECT_DOUBLE_EQ(t.counts[0], 0.5);
}

TEST(Markov, EpochsWeightCounts) {
  MarkovTextLearner a(3, 1, 0.01), b(3, 1, 0.01);
  const Corpus c = corpus({{0, 1, 2}, {2, 2}});
  a.train(c, 3);
  b.train(c);
  b.train(c);
  b.train(c);
  EXPECT_TRUE(a == b);
}

TEST(Markov, LogLikelihoodSumsPositions) {
  MarkovTextLearner m(2, 1, 0.1);
  m.train(corpus({{0, 1}}));
  const auto [ll, n] = m.log_likelihood(corpus({{0, 1}}));
  EXPECT_EQ(n, 2u);
  const double expect = std::log(m.predict_dist({})[0]) + std::log(m.predict_dist({0})[1]);
  EXPECT_NEAR(ll, expect, 1e-12);
}

// Training on its own low-temperature samples narrows a learner.
TEST(MarkovProperty, SelfTrainingReducesAnchorEntropy) {
  Rng gen(77);
  int decreased = 0;
  const int trials = 10;
  for (int trial = 0; trial < trials; ++trial) {
    MarkovTextLearner m(10, 1, 1e-3);
    m.train(random_corpus(gen, 10, 200, 12));
    auto mean_entropy = [&] {
      double h = 0;
      for (Token t = 0; t < 10; ++t) h += entropy(m.predict_dist({t}));
      return h / 10;
    };
    const double before = mean_entropy();
    GenerateOptions opt;
    opt.n = 200;
    opt.max_len = 12;
    opt.top_p = 0.9;
    opt.temperature = 0.7;
    for (int g = 0; g < 3; ++g) {
      const Corpus syn = m.generate(opt, gen);
      m.decay(0.2);
      m.train(syn);
    }
    if (mean_entropy() < before) ++decreased;
  }
  EXPECT_EQ(decreased, trials);
}
