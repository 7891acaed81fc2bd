#include "collapse/regulator.hpp"

#include <algorithm>
#include <cmath>

#include "collapse/error.hpp"

namespace collapse {

double update_trust(double h_prev, double h0) {
  if (!(h0 > 0.0)) fail(ErrorKind::invalid_parameter, "baseline entropy H_0 must be positive");
  const double r = h_prev / h0;
  return std::max(trust_floor, std::min(trust_ceiling, r * r));
}

std::string to_string(ScheduleMode m) {
  switch (m) {
    case ScheduleMode::open_loop: return "open_loop";
    case ScheduleMode::mtr: return "mtr";
    case ScheduleMode::fixed_alpha: return "fixed_alpha";
    case ScheduleMode::random_tau: return "random_tau";
  }
  return "?";
}

std::optional<ScheduleMode> parse_schedule_mode(const std::string& s) {
  if (s == "open_loop") return ScheduleMode::open_loop;
  if (s == "mtr") return ScheduleMode::mtr;
  if (s == "fixed_alpha") return ScheduleMode::fixed_alpha;
  if (s == "random_tau") return ScheduleMode::random_tau;
  return std::nullopt;
}

void MixingSchedule::validate() const {
  if (planned.empty()) fail(ErrorKind::invalid_parameter, "schedule.planned_alpha must not be empty");
  for (double a : planned)
    if (!(a >= 0.0 && a <= 1.0)) fail(ErrorKind::invalid_parameter, "schedule.planned_alpha entries must be in [0, 1]");
  if (!(fixed_alpha >= 0.0 && fixed_alpha <= 1.0))
    fail(ErrorKind::invalid_parameter, "schedule.fixed_alpha must be in [0, 1]");
  if (mode == ScheduleMode::random_tau && tau_source.empty())
    fail(ErrorKind::missing_source, "random_tau mode needs a recorded trust sequence (schedule.tau_source)");
  for (double t : tau_source)
    if (!(t >= trust_floor && t <= trust_ceiling))
      fail(ErrorKind::invalid_parameter, "schedule.tau_source values must be in [0.2, 1]");
}

double planned_alpha(const MixingSchedule& s, int g) {
  if (g < 0) fail(ErrorKind::invalid_parameter, "generation must be nonnegative");
  if (s.planned.empty()) fail(ErrorKind::invalid_parameter, "planned schedule is empty");
  const auto i = std::min(static_cast<std::size_t>(g), s.planned.size() - 1);
  return s.planned[i];
}

TauReplay::TauReplay(std::vector<double> recorded, Rng rng) : source_(std::move(recorded)), rng_(std::move(rng)) {
  if (source_.empty()) fail(ErrorKind::missing_source, "no recorded trust sequence to replay");
}

double TauReplay::next() {
  if (pos_ == order_.size()) {
    order_ = source_;
    rng_.shuffle(order_);
    pos_ = 0;
  }
  return order_[pos_++];
}

AlphaDecision effective_alpha(const MixingSchedule& s, int g, double tau, TauReplay* replay) {
  AlphaDecision d;
  d.alpha_planned = planned_alpha(s, g);
  d.tau = tau;
  switch (s.mode) {
    case ScheduleMode::open_loop:
      d.alpha_eff = d.alpha_planned;
      break;
    case ScheduleMode::mtr:
      d.alpha_eff = tau * d.alpha_planned;
      break;
    case ScheduleMode::fixed_alpha:
      d.alpha_eff = g >= 1 ? s.fixed_alpha : 0.0;
      break;
    case ScheduleMode::random_tau:
      if (replay == nullptr) fail(ErrorKind::missing_source, "random_tau mode without a recorded trust source");
      d.tau = replay->next();
      d.alpha_eff = d.tau * d.alpha_planned;
      break;
  }
  return d;
}

std::size_t synthetic_quota(double alpha, std::size_t n) {
  return static_cast<std::size_t>(std::llround(alpha * static_cast<double>(n)));
}

namespace {

void draw(std::size_t pool, std::size_t quota, bool synthetic, Rng& rng, MixPlan& plan) {
  if (quota == 0) return;
  if (pool == 0)
    fail(ErrorKind::empty_data, std::string(synthetic ? "synthetic" : "real") + " pool is empty but quota is " +
                                    std::to_string(quota));
  if (quota <= pool) {
    // partial Fisher-Yates
    std::vector<std::size_t> idx(pool);
    for (std::size_t i = 0; i < pool; ++i) idx[i] = i;
    for (std::size_t i = 0; i < quota; ++i) {
      const std::size_t j = i + rng.index(pool - i);
      std::swap(idx[i], idx[j]);
      plan.picks.emplace_back(synthetic, idx[i]);
    }
  } else {
    plan.resampled = true;
    for (std::size_t i = 0; i < quota; ++i) plan.picks.emplace_back(synthetic, rng.index(pool));
  }
}

}  // namespace

MixPlan plan_mix(std::size_t real_size, std::size_t synth_size, double alpha, std::size_t n, Rng& rng) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) fail(ErrorKind::invalid_parameter, "alpha must be in [0, 1]");
  MixPlan plan;
  plan.synthetic_count = synthetic_quota(alpha, n);
  plan.picks.reserve(n);
  draw(synth_size, plan.synthetic_count, true, rng, plan);
  draw(real_size, n - plan.synthetic_count, false, rng, plan);
  rng.shuffle(plan.picks);
  return plan;
}

Corpus mix(const Corpus& real, const Corpus& synthetic, double alpha, std::size_t n, Rng& rng,
           double* realized, bool* resampled) {
  auto m = mix(real.sequences, synthetic.sequences, alpha, n, rng);
  if (realized) *realized = m.synthetic_fraction;
  if (resampled) *resampled = m.resampled;
  Corpus c;
  c.sequences = std::move(m.items);
  c.origin = m.synthetic_count == 0 ? Origin::real : (m.synthetic_count == n ? Origin::synthetic : Origin::mixed);
  return c;
}

}  // namespace collapse
