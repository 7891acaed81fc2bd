#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace collapse {

// Portable generator: every draw is derived from raw mt19937_64 output, so
// streams are identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0);

  // Independent stream for a (seed, salt) pair.
  static Rng derive(std::uint64_t seed, std::uint64_t salt);

  std::uint64_t next_u64() { return engine_(); }
  double uniform();                       // [0, 1)
  double uniform(double lo, double hi);   // [lo, hi)
  std::size_t index(std::size_t n);       // [0, n), unbiased
  double normal();
  double gamma(double shape);
  std::vector<double> dirichlet(const std::vector<double>& alpha);

  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = index(i);
      std::swap(v[i - 1], v[j]);
    }
  }

  std::string state() const;
  void set_state(const std::string& s);

  bool operator==(const Rng& o) const { return engine_ == o.engine_; }

 private:
  std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t& x);

}  // namespace collapse
