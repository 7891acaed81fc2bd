#include "collapse/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "collapse/error.hpp"

namespace collapse {

namespace {

constexpr char kMagic[8] = {'S', 'C', 'C', 'K', 'P', 'T', '\0', '\0'};
constexpr std::uint32_t kKindMarkov = 1;
constexpr std::uint32_t kKindSoftmax = 2;

class Writer {
 public:
  void bytes(const void* p, std::size_t n) {
    const auto* b = static_cast<const std::uint8_t*>(p);
    buf_.insert(buf_.end(), b, b + n);
  }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) buf_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) buf_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void i32(std::int32_t v) { u32(static_cast<std::uint32_t>(v)); }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void str(const std::string& s) {
    u64(s.size());
    bytes(s.data(), s.size());
  }
  std::vector<std::uint8_t>& buf() { return buf_; }

 private:
  std::vector<std::uint8_t> buf_;
};

class Reader {
 public:
  Reader(const std::uint8_t* p, std::size_t n) : p_(p), n_(n) {}
  void need(std::size_t k) const {
    if (n_ - pos_ < k) fail(ErrorKind::decode, "checkpoint truncated");
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(p_[pos_++]) << (8 * i);
    return v;
  }
  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(p_[pos_++]) << (8 * i);
    return v;
  }
  std::int32_t i32() { return static_cast<std::int32_t>(u32()); }
  double f64() { return std::bit_cast<double>(u64()); }
  std::string str() {
    const std::uint64_t len = u64();
    need(len);
    std::string s(reinterpret_cast<const char*>(p_ + pos_), len);
    pos_ += len;
    return s;
  }
  bool done() const { return pos_ == n_; }

 private:
  const std::uint8_t* p_;
  std::size_t n_;
  std::size_t pos_ = 0;
};

void write_markov(Writer& w, const MarkovTextLearner& m) {
  w.i32(m.vocab());
  w.i32(m.order());
  w.f64(m.smoothing());
  w.u32(m.trained() ? 1 : 0);
  for (const auto& level : m.tables()) {
    w.u64(level.size());
    for (const auto& [key, tab] : level) {
      w.u64(key);
      w.f64(tab.total);
      std::uint32_t nnz = 0;
      for (double c : tab.counts) nnz += c != 0.0 ? 1 : 0;
      w.u32(nnz);
      for (std::size_t i = 0; i < tab.counts.size(); ++i)
        if (tab.counts[i] != 0.0) {
          w.u32(static_cast<std::uint32_t>(i));
          w.f64(tab.counts[i]);
        }
    }
  }
}

MarkovTextLearner read_markov(Reader& r) {
  const int vocab = r.i32();
  const int order = r.i32();
  const double smoothing = r.f64();
  const bool trained = r.u32() != 0;
  if (vocab < 1 || vocab > (1 << 20) || order < 1 || order > 16 || !(smoothing > 0.0))
    fail(ErrorKind::decode, "invalid markov header");
  MarkovTextLearner m(vocab, order, smoothing);
  std::vector<std::map<std::uint64_t, MarkovTextLearner::Table>> tables(static_cast<std::size_t>(order) + 1);
  for (auto& level : tables) {
    const std::uint64_t n = r.u64();
    for (std::uint64_t i = 0; i < n; ++i) {
      const std::uint64_t key = r.u64();
      MarkovTextLearner::Table tab;
      tab.total = r.f64();
      tab.counts.assign(static_cast<std::size_t>(vocab), 0.0);
      const std::uint32_t nnz = r.u32();
      for (std::uint32_t k = 0; k < nnz; ++k) {
        const std::uint32_t idx = r.u32();
        if (idx >= static_cast<std::uint32_t>(vocab)) fail(ErrorKind::decode, "token index out of range");
        tab.counts[idx] = r.f64();
      }
      if (!level.emplace(key, std::move(tab)).second) fail(ErrorKind::decode, "duplicate context key");
    }
  }
  m.set_tables(std::move(tables), trained);
  return m;
}

void write_softmax(Writer& w, const SoftmaxClassifierLearner& s) {
  w.i32(s.classes());
  w.i32(s.dim());
  w.f64(s.learning_rate());
  for (double v : s.weights()) w.f64(v);
  for (double v : s.bias()) w.f64(v);
}

SoftmaxClassifierLearner read_softmax(Reader& r) {
  const int classes = r.i32();
  const int dim = r.i32();
  const double lr = r.f64();
  if (classes < 2 || classes > (1 << 16) || dim < 1 || dim > (1 << 16) || !(lr > 0.0))
    fail(ErrorKind::decode, "invalid softmax header");
  SoftmaxClassifierLearner s(classes, dim, lr);
  for (double& v : s.weights()) v = r.f64();
  for (double& v : s.bias()) v = r.f64();
  return s;
}

}  // namespace

std::uint64_t fnv1a64(const std::uint8_t* data, std::size_t n) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (std::size_t i = 0; i < n; ++i) {
    h ^= data[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

Checkpoint snapshot(const AnyLearner& learner, std::uint64_t generation, const Rng& rng) {
  return Checkpoint{generation, learner, rng.state()};
}

std::vector<std::uint8_t> serialize(const Checkpoint& ck) {
  Writer w;
  w.bytes(kMagic, sizeof kMagic);
  w.u32(checkpoint_format_version);
  w.u32(std::holds_alternative<MarkovTextLearner>(ck.learner) ? kKindMarkov : kKindSoftmax);
  w.u64(ck.generation);
  if (const auto* m = std::get_if<MarkovTextLearner>(&ck.learner))
    write_markov(w, *m);
  else
    write_softmax(w, std::get<SoftmaxClassifierLearner>(ck.learner));
  w.str(ck.rng_state);
  const std::uint64_t sum = fnv1a64(w.buf().data(), w.buf().size());
  w.u64(sum);
  return std::move(w.buf());
}

Checkpoint deserialize(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < sizeof kMagic + 8 + 8 + 8) fail(ErrorKind::decode, "checkpoint too short");
  if (std::memcmp(bytes.data(), kMagic, sizeof kMagic) != 0) fail(ErrorKind::decode, "bad checkpoint magic");
  const std::size_t body = bytes.size() - 8;
  Reader tail(bytes.data() + body, 8);
  if (tail.u64() != fnv1a64(bytes.data(), body)) fail(ErrorKind::decode, "checkpoint checksum mismatch");

  Reader r(bytes.data() + sizeof kMagic, body - sizeof kMagic);
  const std::uint32_t version = r.u32();
  if (version != checkpoint_format_version)
    fail(ErrorKind::decode, "unsupported checkpoint version " + std::to_string(version));
  const std::uint32_t kind = r.u32();
  Checkpoint ck{r.u64(), SoftmaxClassifierLearner(2, 1, 1.0), {}};
  if (kind == kKindMarkov)
    ck.learner = read_markov(r);
  else if (kind == kKindSoftmax)
    ck.learner = read_softmax(r);
  else
    fail(ErrorKind::decode, "unknown learner kind " + std::to_string(kind));
  ck.rng_state = r.str();
  if (!r.done()) fail(ErrorKind::decode, "trailing bytes in checkpoint");
  Rng probe;
  probe.set_state(ck.rng_state);
  return ck;
}

void save_checkpoint(const Checkpoint& ck, const std::filesystem::path& path) {
  const auto bytes = serialize(ck);
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) fail(ErrorKind::io, "cannot open " + path.string() + " for writing");
  os.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!os) fail(ErrorKind::io, "failed writing " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) fail(ErrorKind::not_found, "checkpoint " + path.string() + " not found");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
  try {
    return deserialize(bytes);
  } catch (const Error& e) {
    fail(e.kind(), path.string() + ": " + e.what());
  }
}

}  // namespace collapse
