#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "collapse/checkpoint.hpp"
#include "collapse/monitor.hpp"
#include "collapse/regulator.hpp"
#include "collapse/sources.hpp"
#include "collapse/stats.hpp"

namespace collapse {

enum class LearnerKind { markov, softmax };

std::string to_string(LearnerKind k);

struct MarkovSettings {
  int order = 2;
  double smoothing = 5e-4;
  double retention = 0.2;
  int epochs = 1;
  int prompt_tokens = 2;
  double top_p = 0.9;
  double temperature = 0.7;
};

struct SoftmaxSettings {
  double learning_rate = 0.5;
  int initial_steps = 200;
  int steps = 50;
  double sharpen_temperature = 0.1;
};

struct RunSpec {
  std::string label = "open_loop";  // condition name, written to the `mode` column
  std::string run_id;               // defaults to <label>_s<seed>
  std::uint64_t seed = 0;
  LearnerKind kind = LearnerKind::markov;
  MarkovSettings markov;
  SoftmaxSettings softmax;
  TextWorldParams text_world;
  FeatureWorldParams feature_world;
  int generations = 12;
  int train_size = 800;      // N
  int synthetic_pool = 0;    // per generation; 0 means N
  MixingSchedule schedule;
  MonitorConfig monitor;

  void validate() const;
  std::string id() const;
  std::size_t pool_size() const;
};

struct TrajectoryRecord {
  TrajectorySnapshot snap;
  double tau = 1.0;
  double alpha_planned = 0.0;
  double alpha_eff = 0.0;
  double realized_synth_frac = 0.0;
  bool hidden_flag = false;
  bool visible_flag = false;

  bool operator==(const TrajectoryRecord&) const = default;
};

struct OnsetReport {
  std::optional<int> hidden;
  std::optional<int> visible;
  std::optional<int> lead_time;

  bool operator==(const OnsetReport&) const = default;
};

struct RunResult {
  std::string run_id;
  std::string label;
  std::uint64_t seed = 0;
  std::vector<TrajectoryRecord> records;
  OnsetReport onsets;
  std::optional<int> diverged_at;
  bool resampled = false;  // some mixture quota exceeded its pool

  double mean_alpha() const;  // mean alpha_eff over g >= 1
};

std::optional<int> detect_hidden_onset(const std::vector<TrajectoryRecord>& records,
                                       double entropy_threshold = 0.5, double drift_threshold = 0.5);
// Non-finite perplexity counts as above any threshold.
std::optional<int> detect_visible_onset(const std::vector<TrajectoryRecord>& records, double factor = 5.0);
OnsetReport detect_onsets(const std::vector<TrajectoryRecord>& records);
// Recomputes onsets and the per-record flags.
void apply_onsets(RunResult& run);

using CheckpointSink = std::function<void(const Checkpoint&)>;
using CheckpointSource = std::function<Checkpoint(int generation)>;

RunResult run_recursive(const RunSpec& spec, const CheckpointSink& sink = {});

// Continues a run from checkpoint `from_gen`. `prior` must hold the records of
// generations 0..from_gen; checkpoints from_gen - W .. from_gen are read to
// rebuild the drift window.
RunResult resume_run(const RunSpec& spec, std::vector<TrajectoryRecord> prior, int from_gen,
                     const CheckpointSource& source, const CheckpointSink& sink = {});

// Independent runs, executed on up to `threads` workers; output order matches input.
using SinkFactory = std::function<CheckpointSink(const RunSpec&)>;
std::vector<RunResult> run_many(const std::vector<RunSpec>& specs, unsigned threads = 0,
                                const SinkFactory& sinks = {});

struct ModeSummary {
  std::string label;
  std::size_t runs = 0;
  double final_ppl_mean = 0.0, final_ppl_std = 0.0;
  double final_H_mean = 0.0, final_H_std = 0.0;
  double alpha_mean = 0.0, alpha_std = 0.0;
  double collapse_fraction = 0.0;
  std::size_t collapsed = 0;
  bool single_sample = false;
};

// Groups runs by label, in order of first appearance.
std::vector<ModeSummary> aggregate(const std::vector<RunResult>& runs);

struct OnsetStats {
  std::vector<std::string> run_ids;
  std::vector<OnsetReport> per_run;
  std::size_t with_both = 0;
  std::size_t ordered = 0;             // hidden strictly before visible
  std::size_t without_visible = 0;     // excluded from lead-time statistics
  std::optional<Quartiles> hidden_q, visible_q, lead_q;
};

OnsetStats onset_statistics(const std::vector<RunResult>& runs);

inline constexpr const char* label_open_loop = "open_loop";
inline constexpr const char* label_mtr = "mtr";
inline constexpr const char* label_fixed_low = "fixed_low_alpha";
inline constexpr const char* label_random_tau = "random_tau";
inline constexpr const char* label_same_pressure = "fixed_same_pressure";

struct BaselineGrid {
  std::vector<RunResult> runs;  // grouped by condition, seeds ascending
  double mtr_mean_alpha = 0.0;
};

// Open-loop and MTR first; then fixed alpha = low_alpha, random tau replaying
// each seed's MTR trust sequence, and fixed alpha = measured MTR mean.
BaselineGrid baseline_grid(const RunSpec& base, const std::vector<std::uint64_t>& seeds,
                           double low_alpha = 0.5, unsigned threads = 0, const SinkFactory& sinks = {});

OnsetStats lead_time_study(const RunSpec& base, int n_seeds, unsigned threads = 0);

struct RecoveryBudget {
  std::string name;
  double real_fraction = 0.1;
  int steps = 1600;
};

std::vector<RecoveryBudget> default_recovery_budgets();

struct RecoveryResult {
  int checkpoint = 0;
  RecoveryBudget budget;
  double ppl = 0.0;
  double H = 0.0;
  TrajectorySnapshot snapshot;
};

// Restores the checkpoint, regenerates its synthetic pool from the stored rng
// state, fine-tunes on round(real_fraction * steps) real and the rest
// synthetic items, and evaluates on the source run's validation set.
RecoveryResult recover(const RunSpec& source, const Checkpoint& ck, const RecoveryBudget& budget);

std::vector<RecoveryResult> recovery_grid(const RunSpec& source, const CheckpointSource& checkpoints,
                                          const std::vector<int>& generations,
                                          const std::vector<RecoveryBudget>& budgets, unsigned threads = 0);

}  // namespace collapse
