#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "collapse/engine.hpp"

namespace collapse {

inline constexpr const char* records_header =
    "run_id,seed,mode,gen,H,S,ppl,tau,alpha_planned,alpha_eff,realized_synth_frac,rare_token_mass,"
    "tail_coverage,ece,hidden_flag,visible_flag";

inline constexpr const char* recovery_header = "run_id,checkpoint,budget,real_fraction,steps,ppl,H";

// Numeric columns that can be charted.
const std::vector<std::string>& record_quantities();
std::optional<double> record_value(const TrajectoryRecord& r, const std::string& quantity);

std::string format_records(const std::vector<RunResult>& runs);
// Groups rows by run_id in order of appearance; onsets are re-detected.
std::vector<RunResult> parse_records(const std::string& text);

std::string format_onsets_json(const RunResult& run);
std::string format_recovery(const std::string& run_id, const std::vector<RecoveryResult>& results);

struct RecoveryRow {
  std::string run_id;
  int checkpoint = 0;
  std::string budget;
  double real_fraction = 0.0;
  int steps = 0;
  double ppl = 0.0;
  double H = 0.0;
};
std::vector<RecoveryRow> parse_recovery(const std::string& text);

void write_text_file(const std::filesystem::path& path, const std::string& content);
std::string read_text_file(const std::filesystem::path& path);

void write_records(const std::vector<RunResult>& runs, const std::filesystem::path& path);

// Run-directory layout:
//   <out>/<run_id>/records.csv
//   <out>/<run_id>/onsets.json
//   <out>/<run_id>/checkpoints/gen_<g>.ckpt
inline constexpr const char* output_dir_env = "COLLAPSE_LAB_OUT";
std::filesystem::path default_output_dir();  // $COLLAPSE_LAB_OUT, else ./runs
std::filesystem::path checkpoint_path(const std::filesystem::path& out, const std::string& run_id, int g);
CheckpointSink directory_sink(const std::filesystem::path& out, const std::string& run_id);
CheckpointSource directory_source(const std::filesystem::path& out, const std::string& run_id);
void write_run(const std::filesystem::path& out, const RunResult& run);

}  // namespace collapse
