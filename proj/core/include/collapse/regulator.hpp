#pragma once

#include <optional>
#include <string>
#include <vector>

#include "collapse/rng.hpp"
#include "collapse/types.hpp"

namespace collapse {

inline constexpr double trust_floor = 0.2;
inline constexpr double trust_ceiling = 1.0;

// tau = clip((H_prev / H_0)^2, 0.2, 1)
double update_trust(double h_prev, double h0);

enum class ScheduleMode { open_loop, mtr, fixed_alpha, random_tau };

std::string to_string(ScheduleMode m);
std::optional<ScheduleMode> parse_schedule_mode(const std::string& s);

struct MixingSchedule {
  ScheduleMode mode = ScheduleMode::open_loop;
  std::vector<double> planned = {0.0, 0.25, 0.5, 0.75, 1.0};
  double fixed_alpha = 0.27;
  // random_tau: recorded MTR trust values for generations 1..G
  std::vector<double> tau_source;

  void validate() const;
};

double planned_alpha(const MixingSchedule& s, int g);

// Shuffled replay of a recorded trust sequence; reshuffles when exhausted.
class TauReplay {
 public:
  TauReplay(std::vector<double> recorded, Rng rng);
  double next();

 private:
  std::vector<double> source_;
  std::vector<double> order_;
  std::size_t pos_ = 0;
  Rng rng_;
};

struct AlphaDecision {
  double tau = 1.0;
  double alpha_planned = 0.0;
  double alpha_eff = 0.0;
};

// `tau` is the trust computed from the monitor; random_tau mode replaces it
// with the next replayed value.
AlphaDecision effective_alpha(const MixingSchedule& s, int g, double tau, TauReplay* replay);

template <class Item>
struct Mixture {
  std::vector<Item> items;
  std::size_t synthetic_count = 0;
  double synthetic_fraction = 0.0;
  bool resampled = false;  // a quota exceeded its pool and was drawn with replacement
};

std::size_t synthetic_quota(double alpha, std::size_t n);

// Index plan for a mixture: (from_synthetic, index) pairs, shuffled.
struct MixPlan {
  std::vector<std::pair<bool, std::size_t>> picks;
  std::size_t synthetic_count = 0;
  bool resampled = false;
};

MixPlan plan_mix(std::size_t real_size, std::size_t synth_size, double alpha, std::size_t n, Rng& rng);

template <class Item>
Mixture<Item> mix(const std::vector<Item>& real, const std::vector<Item>& synthetic, double alpha,
                  std::size_t n, Rng& rng) {
  const MixPlan plan = plan_mix(real.size(), synthetic.size(), alpha, n, rng);
  Mixture<Item> m;
  m.items.reserve(n);
  for (const auto& [syn, idx] : plan.picks) m.items.push_back(syn ? synthetic[idx] : real[idx]);
  m.synthetic_count = plan.synthetic_count;
  m.synthetic_fraction = n == 0 ? 0.0 : static_cast<double>(plan.synthetic_count) / static_cast<double>(n);
  m.resampled = plan.resampled;
  return m;
}

Corpus mix(const Corpus& real, const Corpus& synthetic, double alpha, std::size_t n, Rng& rng,
           double* realized = nullptr, bool* resampled = nullptr);

}  // namespace collapse
