#include "collapse/engine.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <memory>
#include <thread>

#include "collapse/error.hpp"
#include "collapse/sampling.hpp"
#include "collapse/stats.hpp"

namespace collapse {

std::string to_string(LearnerKind k) { return k == LearnerKind::markov ? "markov" : "softmax"; }

void RunSpec::validate() const {
  if (generations < 1) fail(ErrorKind::invalid_parameter, "run.generations must be >= 1");
  if (train_size < 1) fail(ErrorKind::invalid_parameter, "run.train_size must be >= 1");
  if (synthetic_pool < 0) fail(ErrorKind::invalid_parameter, "run.synthetic_pool must be >= 0");
  if (label.empty()) fail(ErrorKind::invalid_parameter, "run label must not be empty");
  schedule.validate();
  monitor.validate();
  if (kind == LearnerKind::markov) {
    if (markov.order < 1) fail(ErrorKind::invalid_parameter, "learner.k must be >= 1");
    if (!(markov.smoothing > 0.0)) fail(ErrorKind::invalid_parameter, "learner.lambda must be > 0");
    if (!(markov.retention >= 0.0 && markov.retention <= 1.0))
      fail(ErrorKind::invalid_parameter, "learner.retention must be in [0, 1]");
    if (markov.epochs < 1) fail(ErrorKind::invalid_parameter, "learner.epochs must be >= 1");
    if (markov.prompt_tokens < 0) fail(ErrorKind::invalid_parameter, "learner.prompt_tokens must be >= 0");
    if (!(markov.top_p > 0.0 && markov.top_p <= 1.0)) fail(ErrorKind::invalid_parameter, "learner.top_p must be in (0, 1]");
    if (!(markov.temperature > 0.0)) fail(ErrorKind::invalid_parameter, "learner.temperature must be > 0");
    if (text_world.vocab < 2) fail(ErrorKind::invalid_parameter, "learner.V must be >= 2");
  } else {
    if (!(softmax.learning_rate > 0.0)) fail(ErrorKind::invalid_parameter, "learner.eta must be > 0");
    if (softmax.initial_steps < 0 || softmax.steps < 0)
      fail(ErrorKind::invalid_parameter, "learner steps must be >= 0");
    if (!(softmax.sharpen_temperature > 0.0))
      fail(ErrorKind::invalid_parameter, "learner.sharpen_temperature must be > 0");
  }
}

std::string RunSpec::id() const { return run_id.empty() ? label + "_s" + std::to_string(seed) : run_id; }

std::size_t RunSpec::pool_size() const {
  return static_cast<std::size_t>(synthetic_pool > 0 ? synthetic_pool : train_size);
}

double RunResult::mean_alpha() const {
  std::vector<double> a;
  for (const auto& r : records)
    if (r.snap.g >= 1) a.push_back(r.alpha_eff);
  return a.empty() ? 0.0 : mean(a);
}

// ---------------------------------------------------------------- onsets

std::optional<int> detect_hidden_onset(const std::vector<TrajectoryRecord>& records, double entropy_threshold,
                                       double drift_threshold) {
  if (records.empty()) return std::nullopt;
  const double h0 = records.front().snap.H;
  if (!(h0 > 0.0)) return std::nullopt;
  for (const auto& r : records)
    if (r.snap.H / h0 < entropy_threshold) return r.snap.g;
  std::optional<double> s_ref;
  for (const auto& r : records) {
    if (!r.snap.S) continue;
    if (!s_ref) {
      s_ref = *r.snap.S;
      if (!(*s_ref > 0.0)) return std::nullopt;
      continue;
    }
    if (*r.snap.S / *s_ref < drift_threshold) return r.snap.g;
  }
  return std::nullopt;
}

std::optional<int> detect_visible_onset(const std::vector<TrajectoryRecord>& records, double factor) {
  auto val = [](double p) { return std::isnan(p) ? std::numeric_limits<double>::infinity() : p; };
  double running_min = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < records.size(); ++i) {
    running_min = std::min(running_min, val(records[i].snap.ppl));
    const double threshold = factor * running_min;
    if (!(val(records[i].snap.ppl) > threshold)) continue;
    bool stays = true;
    for (std::size_t j = i + 1; j < records.size() && stays; ++j) stays = val(records[j].snap.ppl) > threshold;
    if (stays) return records[i].snap.g;
  }
  return std::nullopt;
}

OnsetReport detect_onsets(const std::vector<TrajectoryRecord>& records) {
  OnsetReport o;
  o.hidden = detect_hidden_onset(records);
  o.visible = detect_visible_onset(records);
  if (o.hidden && o.visible) o.lead_time = *o.visible - *o.hidden;
  return o;
}

void apply_onsets(RunResult& run) {
  run.onsets = detect_onsets(run.records);
  // divergence is visible collapse at the generation it happens
  if (run.diverged_at && (!run.onsets.visible || *run.diverged_at < *run.onsets.visible)) {
    run.onsets.visible = run.diverged_at;
    run.onsets.lead_time.reset();
    if (run.onsets.hidden) run.onsets.lead_time = *run.onsets.visible - *run.onsets.hidden;
  }
  for (auto& r : run.records) {
    r.hidden_flag = run.onsets.hidden && r.snap.g >= *run.onsets.hidden;
    r.visible_flag = run.onsets.visible && r.snap.g >= *run.onsets.visible;
  }
}

// ---------------------------------------------------------------- sessions

namespace {

TrajectorySnapshot diverged_snapshot(int g) {
  TrajectorySnapshot s;
  s.g = g;
  s.H = std::numeric_limits<double>::quiet_NaN();
  s.ppl = std::numeric_limits<double>::infinity();
  s.ece = std::numeric_limits<double>::quiet_NaN();
  return s;
}

class Session {
 public:
  virtual ~Session() = default;
  virtual void train_initial(Rng& rng) = 0;
  virtual void make_pool(Rng& rng) = 0;
  virtual TrajectorySnapshot measure(const std::vector<std::vector<double>>& z, int g) = 0;
  // Builds the mixture, trains, returns the realized synthetic fraction.
  virtual double step(double alpha, Rng& rng) = 0;
  virtual AnyLearner learner() const = 0;
  virtual void restore(const AnyLearner& l) = 0;
  virtual std::vector<double> representation() const = 0;
  virtual void recover_train(double real_fraction, int steps, Rng& rng) = 0;
  bool resampled = false;
};

class TextSession final : public Session {
 public:
  explicit TextSession(const RunSpec& spec)
      : spec_(spec),
        data_(make_text_dataset(spec.text_world)),
        learner_(spec.text_world.vocab, spec.markov.order, spec.markov.smoothing) {}

  void train_initial(Rng& rng) override {
    bool res = false;
    const Corpus c = mix(data_.real, Corpus{}, 0.0, static_cast<std::size_t>(spec_.train_size), rng, nullptr, &res);
    resampled |= res;
    learner_.train(c, spec_.markov.epochs);
  }

  void make_pool(Rng& rng) override {
    GenerateOptions o;
    o.n = spec_.pool_size();
    o.max_len = static_cast<std::size_t>(spec_.text_world.seq_len);
    o.top_p = spec_.markov.top_p;
    o.temperature = spec_.markov.temperature;
    o.prompt_tokens = static_cast<std::size_t>(spec_.markov.prompt_tokens);
    pool_ = learner_.generate(o, rng);
  }

  TrajectorySnapshot measure(const std::vector<std::vector<double>>& z, int g) override {
    return snapshot_all(learner_, data_, pool_, spec_.monitor, z, g);
  }

  double step(double alpha, Rng& rng) override {
    double realized = 0.0;
    bool res = false;
    const Corpus c = mix(data_.real, pool_, alpha, static_cast<std::size_t>(spec_.train_size), rng, &realized, &res);
    resampled |= res;
    learner_.decay(spec_.markov.retention);
    learner_.train(c, spec_.markov.epochs);
    return realized;
  }

  void recover_train(double real_fraction, int steps, Rng& rng) override {
    if (steps == 0) return;
    const auto n = static_cast<std::size_t>(steps);
    const std::size_t n_real = synthetic_quota(real_fraction, n);
    const double alpha = static_cast<double>(n - n_real) / static_cast<double>(n);
    const Corpus c = mix(data_.real, pool_, alpha, n, rng);
    learner_.train(c, spec_.markov.epochs);
  }

  AnyLearner learner() const override { return learner_; }
  void restore(const AnyLearner& l) override {
    const auto* m = std::get_if<MarkovTextLearner>(&l);
    if (!m) fail(ErrorKind::decode, "checkpoint holds a classifier, run expects a markov learner");
    if (m->vocab() != spec_.text_world.vocab || m->order() != spec_.markov.order)
      fail(ErrorKind::decode, "checkpoint learner shape does not match the run spec");
    learner_ = *m;
  }
  std::vector<double> representation() const override { return learner_.representation(data_.anchors); }

 private:
  const RunSpec& spec_;
  TextDataset data_;
  MarkovTextLearner learner_;
  Corpus pool_;
};

class FeatureSession final : public Session {
 public:
  explicit FeatureSession(const RunSpec& spec)
      : spec_(spec),
        data_(make_feature_dataset(spec.feature_world)),
        learner_(spec.feature_world.classes, spec.feature_world.dim, spec.softmax.learning_rate) {}

  void train_initial(Rng& rng) override {
    auto m = mix(data_.real.examples, std::vector<FeatureExample>{}, 0.0,
                 static_cast<std::size_t>(spec_.train_size), rng);
    resampled |= m.resampled;
    learner_.train(LabeledSet{std::move(m.items), Origin::real}, spec_.softmax.initial_steps);
  }

  // Pseudo-labels real-pool features with the current learner, sharpened.
  void make_pool(Rng& rng) override {
    pool_.clear();
    const std::size_t n = spec_.pool_size();
    pool_.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      const auto& x = data_.real.examples[rng.index(data_.real.size())].features;
      pool_.push_back({x, std::nullopt, sharpen(learner_.predict_dist(x), spec_.softmax.sharpen_temperature)});
    }
  }

  TrajectorySnapshot measure(const std::vector<std::vector<double>>& z, int g) override {
    return snapshot_all(learner_, data_, spec_.monitor, z, g);
  }

  double step(double alpha, Rng& rng) override {
    auto m = mix(data_.real.examples, pool_, alpha, static_cast<std::size_t>(spec_.train_size), rng);
    resampled |= m.resampled;
    learner_.train(LabeledSet{std::move(m.items), Origin::mixed}, spec_.softmax.steps);
    return m.synthetic_fraction;
  }

  void recover_train(double real_fraction, int steps, Rng& rng) override {
    if (steps == 0) return;
    const auto n = static_cast<std::size_t>(spec_.train_size);
    const std::size_t n_real = synthetic_quota(real_fraction, n);
    const double alpha = static_cast<double>(n - n_real) / static_cast<double>(n);
    auto m = mix(data_.real.examples, pool_, alpha, n, rng);
    learner_.train(LabeledSet{std::move(m.items), Origin::mixed}, steps);
  }

  AnyLearner learner() const override { return learner_; }
  void restore(const AnyLearner& l) override {
    const auto* s = std::get_if<SoftmaxClassifierLearner>(&l);
    if (!s) fail(ErrorKind::decode, "checkpoint holds a markov learner, run expects a classifier");
    if (s->classes() != spec_.feature_world.classes || s->dim() != spec_.feature_world.dim)
      fail(ErrorKind::decode, "checkpoint learner shape does not match the run spec");
    learner_ = *s;
  }
  std::vector<double> representation() const override { return learner_.representation(data_.anchors); }

 private:
  const RunSpec& spec_;
  FeatureDataset data_;
  SoftmaxClassifierLearner learner_;
  std::vector<FeatureExample> pool_;
};

std::unique_ptr<Session> make_session(const RunSpec& spec) {
  if (spec.kind == LearnerKind::markov) return std::make_unique<TextSession>(spec);
  return std::make_unique<FeatureSession>(spec);
}

constexpr std::uint64_t kReplaySalt = 0x7a0;

std::unique_ptr<TauReplay> make_replay(const RunSpec& spec) {
  if (spec.schedule.mode != ScheduleMode::random_tau) return nullptr;
  return std::make_unique<TauReplay>(spec.schedule.tau_source, Rng::derive(spec.seed, kReplaySalt));
}

struct LoopState {
  int g = 0;
  double h0 = 0.0;
  AlphaDecision pending;  // decision that produced learner g
  double realized = 0.0;
  std::vector<std::vector<double>> z;
  std::optional<int> diverged_at;
};

void run_loop(const RunSpec& spec, Session& session, Rng& rng, LoopState& st, TauReplay* replay,
              RunResult& out, const CheckpointSink& sink) {
  for (;; ++st.g) {
    TrajectorySnapshot snap;
    try {
      if (st.diverged_at) throw Error(ErrorKind::numerical_divergence, "learner diverged");
      session.make_pool(rng);
      snap = session.measure(st.z, st.g);
      if (!std::isfinite(snap.H) || !std::isfinite(snap.ppl))
        throw Error(ErrorKind::numerical_divergence, "non-finite metrics");
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::numerical_divergence) throw;
      snap = diverged_snapshot(st.g);
      st.diverged_at = st.g;
    }
    if (st.g == 0) st.h0 = snap.H;
    st.z.resize(static_cast<std::size_t>(st.g));
    st.z.push_back(snap.z);

    TrajectoryRecord rec;
    rec.snap = std::move(snap);
    rec.tau = st.pending.tau;
    rec.alpha_planned = st.pending.alpha_planned;
    rec.alpha_eff = st.pending.alpha_eff;
    rec.realized_synth_frac = st.realized;
    out.records.push_back(std::move(rec));

    if (st.g >= spec.generations || st.diverged_at) break;

    const double tau = update_trust(out.records.back().snap.H, st.h0);
    st.pending = effective_alpha(spec.schedule, st.g + 1, tau, replay);
    try {
      st.realized = session.step(st.pending.alpha_eff, rng);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::numerical_divergence) throw;
      st.diverged_at = st.g + 1;
    }
    if (sink && !st.diverged_at) sink(snapshot(session.learner(), static_cast<std::uint64_t>(st.g + 1), rng));
  }
  out.diverged_at = st.diverged_at;
  out.resampled = session.resampled;
  apply_onsets(out);
}

RunResult blank_result(const RunSpec& spec) {
  RunResult r;
  r.run_id = spec.id();
  r.label = spec.label;
  r.seed = spec.seed;
  return r;
}

}  // namespace

RunResult run_recursive(const RunSpec& spec, const CheckpointSink& sink) {
  spec.validate();
  auto session = make_session(spec);
  Rng rng(spec.seed);
  auto replay = make_replay(spec);
  RunResult out = blank_result(spec);
  session->train_initial(rng);
  if (sink) sink(snapshot(session->learner(), 0, rng));
  LoopState st;
  run_loop(spec, *session, rng, st, replay.get(), out, sink);
  return out;
}

RunResult resume_run(const RunSpec& spec, std::vector<TrajectoryRecord> prior, int from_gen,
                     const CheckpointSource& source, const CheckpointSink& sink) {
  spec.validate();
  if (from_gen < 0 || from_gen > spec.generations)
    fail(ErrorKind::invalid_parameter, "resume generation outside the run");
  if (prior.size() < static_cast<std::size_t>(from_gen) + 1)
    fail(ErrorKind::not_enough_history, "resume needs records for generations 0.." + std::to_string(from_gen));
  for (int g = 0; g <= from_gen; ++g)
    if (prior[static_cast<std::size_t>(g)].snap.g != g)
      fail(ErrorKind::malformed_input, "prior records are not contiguous from generation 0");
  if (!source) fail(ErrorKind::missing_source, "resume needs a checkpoint source");

  auto session = make_session(spec);
  LoopState st;
  st.g = from_gen;
  st.h0 = prior.front().snap.H;
  st.z.resize(static_cast<std::size_t>(from_gen));
  for (int g = std::max(0, from_gen - spec.monitor.window); g < from_gen; ++g) {
    session->restore(source(g).learner);
    st.z[static_cast<std::size_t>(g)] = session->representation();
  }
  const Checkpoint ck = source(from_gen);
  if (ck.generation != static_cast<std::uint64_t>(from_gen))
    fail(ErrorKind::decode, "checkpoint generation does not match the requested one");
  session->restore(ck.learner);
  Rng rng;
  rng.set_state(ck.rng_state);

  auto replay = make_replay(spec);
  if (replay)
    for (int g = 1; g <= from_gen; ++g) replay->next();
  const auto& last = prior[static_cast<std::size_t>(from_gen)];
  st.pending = {last.tau, last.alpha_planned, last.alpha_eff};
  st.realized = last.realized_synth_frac;

  RunResult out = blank_result(spec);
  prior.resize(static_cast<std::size_t>(from_gen));
  out.records = std::move(prior);
  run_loop(spec, *session, rng, st, replay.get(), out, sink);
  return out;
}

namespace {

template <class T, class F>
std::vector<T> parallel_map(std::size_t n, unsigned threads, F&& fn) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  std::vector<T> out(n);
  for (std::size_t start = 0; start < n; start += threads) {
    const std::size_t end = std::min(n, start + threads);
    if (end - start == 1) {
      out[start] = fn(start);
      continue;
    }
    std::vector<std::future<T>> batch;
    for (std::size_t i = start; i < end; ++i) batch.push_back(std::async(std::launch::async, fn, i));
    for (std::size_t i = start; i < end; ++i) out[i] = batch[i - start].get();
  }
  return out;
}

}  // namespace

std::vector<RunResult> run_many(const std::vector<RunSpec>& specs, unsigned threads, const SinkFactory& sinks) {
  for (const auto& s : specs) s.validate();
  return parallel_map<RunResult>(specs.size(), threads, [&](std::size_t i) {
    return run_recursive(specs[i], sinks ? sinks(specs[i]) : CheckpointSink{});
  });
}

// ---------------------------------------------------------------- aggregation

std::vector<ModeSummary> aggregate(const std::vector<RunResult>& runs) {
  std::vector<ModeSummary> out;
  std::vector<std::vector<const RunResult*>> groups;
  for (const auto& r : runs) {
    auto it = std::find_if(out.begin(), out.end(), [&](const ModeSummary& m) { return m.label == r.label; });
    if (it == out.end()) {
      out.push_back({});
      out.back().label = r.label;
      groups.emplace_back();
      it = out.end() - 1;
    }
    groups[static_cast<std::size_t>(it - out.begin())].push_back(&r);
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    std::vector<double> ppl, h, alpha;
    for (const RunResult* r : groups[i]) {
      if (r->records.empty()) continue;
      ppl.push_back(r->records.back().snap.ppl);
      h.push_back(r->records.back().snap.H);
      alpha.push_back(r->mean_alpha());
      out[i].collapsed += r->onsets.visible ? 1 : 0;
    }
    auto& m = out[i];
    m.runs = ppl.size();
    if (m.runs == 0) continue;
    m.final_ppl_mean = mean(ppl);
    m.final_ppl_std = sample_std(ppl);
    m.final_H_mean = mean(h);
    m.final_H_std = sample_std(h);
    m.alpha_mean = mean(alpha);
    m.alpha_std = sample_std(alpha);
    m.collapse_fraction = static_cast<double>(m.collapsed) / static_cast<double>(m.runs);
    m.single_sample = m.runs == 1;
  }
  return out;
}

OnsetStats onset_statistics(const std::vector<RunResult>& runs) {
  OnsetStats s;
  std::vector<double> hid, vis, lead;
  for (const auto& r : runs) {
    s.run_ids.push_back(r.run_id);
    s.per_run.push_back(r.onsets);
    if (r.onsets.hidden) hid.push_back(*r.onsets.hidden);
    if (r.onsets.visible)
      vis.push_back(*r.onsets.visible);
    else
      ++s.without_visible;
    if (r.onsets.hidden && r.onsets.visible) {
      ++s.with_both;
      s.ordered += *r.onsets.hidden < *r.onsets.visible ? 1 : 0;
      lead.push_back(*r.onsets.lead_time);
    }
  }
  if (!hid.empty()) s.hidden_q = quartiles(hid);
  if (!vis.empty()) s.visible_q = quartiles(vis);
  if (!lead.empty()) s.lead_q = quartiles(lead);
  return s;
}

// ---------------------------------------------------------------- protocols

namespace {

std::vector<RunSpec> per_seed(RunSpec base, const std::string& label, const std::vector<std::uint64_t>& seeds) {
  base.label = label;
  base.run_id.clear();
  std::vector<RunSpec> out;
  for (auto s : seeds) {
    base.seed = s;
    out.push_back(base);
  }
  return out;
}

}  // namespace

BaselineGrid baseline_grid(const RunSpec& base, const std::vector<std::uint64_t>& seeds, double low_alpha,
                           unsigned threads, const SinkFactory& sinks) {
  if (seeds.empty()) fail(ErrorKind::invalid_parameter, "baseline grid needs at least one seed");
  const std::size_t n = seeds.size();

  std::vector<RunSpec> first = per_seed(base, label_open_loop, seeds);
  for (auto& s : first) s.schedule.mode = ScheduleMode::open_loop;
  auto mtr = per_seed(base, label_mtr, seeds);
  for (auto& s : mtr) s.schedule.mode = ScheduleMode::mtr;
  first.insert(first.end(), mtr.begin(), mtr.end());
  BaselineGrid grid;
  grid.runs = run_many(first, threads, sinks);

  std::vector<double> alphas;
  for (std::size_t i = n; i < 2 * n; ++i) alphas.push_back(grid.runs[i].mean_alpha());
  grid.mtr_mean_alpha = mean(alphas);

  std::vector<RunSpec> second = per_seed(base, label_fixed_low, seeds);
  for (auto& s : second) {
    s.schedule.mode = ScheduleMode::fixed_alpha;
    s.schedule.fixed_alpha = low_alpha;
  }
  auto rnd = per_seed(base, label_random_tau, seeds);
  for (std::size_t i = 0; i < n; ++i) {
    rnd[i].schedule.mode = ScheduleMode::random_tau;
    rnd[i].schedule.tau_source.clear();
    for (const auto& r : grid.runs[n + i].records)
      if (r.snap.g >= 1) rnd[i].schedule.tau_source.push_back(r.tau);
  }
  second.insert(second.end(), rnd.begin(), rnd.end());
  auto same = per_seed(base, label_same_pressure, seeds);
  for (auto& s : same) {
    s.schedule.mode = ScheduleMode::fixed_alpha;
    s.schedule.fixed_alpha = grid.mtr_mean_alpha;
  }
  second.insert(second.end(), same.begin(), same.end());
  auto rest = run_many(second, threads, sinks);
  grid.runs.insert(grid.runs.end(), std::make_move_iterator(rest.begin()), std::make_move_iterator(rest.end()));
  return grid;
}

OnsetStats lead_time_study(const RunSpec& base, int n_seeds, unsigned threads) {
  if (n_seeds < 1) fail(ErrorKind::invalid_parameter, "lead-time study needs at least one seed");
  std::vector<std::uint64_t> seeds;
  for (int i = 0; i < n_seeds; ++i) seeds.push_back(base.seed + static_cast<std::uint64_t>(i));
  auto specs = per_seed(base, label_open_loop, seeds);
  for (auto& s : specs) s.schedule.mode = ScheduleMode::open_loop;
  return onset_statistics(run_many(specs, threads));
}

std::vector<RecoveryBudget> default_recovery_budgets() {
  return {{"weak", 0.005, 400}, {"medium", 0.02, 800}, {"strong", 0.10, 1600}};
}

RecoveryResult recover(const RunSpec& source, const Checkpoint& ck, const RecoveryBudget& budget) {
  source.validate();
  if (!(budget.real_fraction > 0.0 && budget.real_fraction <= 1.0))
    fail(ErrorKind::invalid_parameter, "recovery.real_fractions must be in (0, 1]");
  if (budget.steps < 0) fail(ErrorKind::invalid_parameter, "recovery.steps must be >= 0");
  auto session = make_session(source);
  session->restore(ck.learner);
  Rng rng;
  rng.set_state(ck.rng_state);
  session->make_pool(rng);  // the pool the source run drew at this generation
  session->recover_train(budget.real_fraction, budget.steps, rng);
  RecoveryResult r;
  r.checkpoint = static_cast<int>(ck.generation);
  r.budget = budget;
  r.snapshot = session->measure({}, 0);
  r.ppl = r.snapshot.ppl;
  r.H = r.snapshot.H;
  return r;
}

std::vector<RecoveryResult> recovery_grid(const RunSpec& source, const CheckpointSource& checkpoints,
                                          const std::vector<int>& generations,
                                          const std::vector<RecoveryBudget>& budgets, unsigned threads) {
  if (!checkpoints) fail(ErrorKind::missing_source, "recovery needs a checkpoint source");
  std::vector<Checkpoint> cks;
  for (int g : generations) {
    if (g < 0 || g > source.generations)
      fail(ErrorKind::invalid_parameter, "recovery checkpoint " + std::to_string(g) + " outside [0, " +
                                             std::to_string(source.generations) + "]");
    cks.push_back(checkpoints(g));
  }
  const std::size_t nb = budgets.size();
  return parallel_map<RecoveryResult>(cks.size() * nb, threads, [&](std::size_t i) {
    return recover(source, cks[i / nb], budgets[i % nb]);
  });
}

}  // namespace collapse
