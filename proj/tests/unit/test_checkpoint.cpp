#include <gtest/gtest.h>

#include <cstring>
#include <fstream>

#include "collapse/checkpoint.hpp"
#include "collapse/error.hpp"
#include "test_util.hpp"

using namespace collapse;

namespace {

MarkovTextLearner trained_markov() {
  MarkovTextLearner m(6, 2, 0.01);
  Rng rng(1);
  Corpus c;
  for (int i = 0; i < 30; ++i) {
    TokenSequence s;
    for (int t = 0; t < 8; ++t) s.push_back(static_cast<Token>(rng.index(6)));
    c.sequences.push_back(s);
  }
  m.train(c);
  m.decay(0.3);
  return m;
}

void expect_decode_error(const std::vector<std::uint8_t>& bytes, const std::string& fragment) {
  try {
    deserialize(bytes);
    FAIL() << "expected decode error containing '" << fragment << "'";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::decode);
    EXPECT_NE(std::string(e.what()).find(fragment), std::string::npos) << e.what();
  }
}

void reseal(std::vector<std::uint8_t>& bytes) {
  const std::size_t body = bytes.size() - 8;
  std::uint64_t h = fnv1a64(bytes.data(), body);
  for (int i = 0; i < 8; ++i) bytes[body + i] = static_cast<std::uint8_t>(h >> (8 * i));
}

}  // namespace

TEST(Checkpoint, MarkovRoundTripIsExact) {
  Rng rng(77);
  rng.uniform();
  const Checkpoint ck = snapshot(trained_markov(), 5, rng);
  const Checkpoint back = deserialize(serialize(ck));
  EXPECT_EQ(back.generation, 5u);
  ASSERT_TRUE(std::holds_alternative<MarkovTextLearner>(back.learner));
  EXPECT_TRUE(std::get<MarkovTextLearner>(back.learner) == std::get<MarkovTextLearner>(ck.learner));
  Rng restored;
  restored.set_state(back.rng_state);
  EXPECT_TRUE(restored == rng);
  EXPECT_EQ(serialize(back), serialize(ck));
}

TEST(Checkpoint, RestoredMarkovPredictsIdentically) {
  const auto m = trained_markov();
  const Checkpoint back = deserialize(serialize(snapshot(m, 0, Rng(0))));
  const auto& r = std::get<MarkovTextLearner>(back.learner);
  for (Token a = 0; a < 6; ++a)
    for (Token b = 0; b < 6; ++b) EXPECT_EQ(r.predict_dist({a, b}), m.predict_dist({a, b}));
}

TEST(Checkpoint, SoftmaxRoundTripIsExact) {
  SoftmaxClassifierLearner c(3, 2, 0.25);
  c.weights() = {0.1, -0.2, 1e-300, 3.5, -7.25, 0.0};
  c.bias() = {1.0 / 3.0, -0.5, 2.0};
  const Checkpoint back = deserialize(serialize(snapshot(c, 2, Rng(4))));
  EXPECT_TRUE(std::get<SoftmaxClassifierLearner>(back.learner) == c);
}

TEST(Checkpoint, FileRoundTrip) {
  test::TempDir dir;
  const auto path = dir.path() / "sub" / "gen_3.ckpt";
  std::filesystem::create_directories(path.parent_path());
  const Checkpoint ck = snapshot(trained_markov(), 3, Rng(9));
  save_checkpoint(ck, path);
  EXPECT_EQ(serialize(load_checkpoint(path)), serialize(ck));
}

TEST(Checkpoint, MissingFileIsNotFound) {
  try {
    load_checkpoint("/nonexistent/gen_0.ckpt");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::not_found);
  }
}

TEST(Checkpoint, CorruptionIsDetected) {
  const auto bytes = serialize(snapshot(trained_markov(), 1, Rng(0)));
  auto flipped = bytes;
  flipped[bytes.size() / 2] ^= 0x40;
  expect_decode_error(flipped, "checksum");

  auto truncated = bytes;
  truncated.resize(10);
  expect_decode_error(truncated, "short");

  auto magic = bytes;
  magic[0] = 'X';
  expect_decode_error(magic, "magic");
}

TEST(Checkpoint, VersionMismatchIsRejected) {
  auto bytes = serialize(snapshot(trained_markov(), 1, Rng(0)));
  bytes[8] = 2;  // version field follows the 8-byte magic
  reseal(bytes);
  expect_decode_error(bytes, "version 2");
}

TEST(Checkpoint, UnknownKindIsRejected) {
  auto bytes = serialize(snapshot(trained_markov(), 1, Rng(0)));
  bytes[12] = 9;
  reseal(bytes);
  expect_decode_error(bytes, "kind");
}

TEST(Checkpoint, FnvKnownVectors) {
  EXPECT_EQ(fnv1a64(nullptr, 0), 0xcbf29ce484222325ULL);
  const std::uint8_t a = 'a';
  EXPECT_EQ(fnv1a64(&a, 1), 0xaf63dc4c8601ec8cULL);
}
