#include "collapse/records.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "collapse/error.hpp"
#include "collapse/numfmt.hpp"

namespace collapse {

namespace {

std::string opt(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) out.push_back(line);
  }
  return out;
}

double num(const std::string& s, std::size_t line, const char* col) {
  const auto v = parse_double(s);
  if (!v) fail(ErrorKind::malformed_input, "line " + std::to_string(line) + ": bad value for " + col + ": '" + s + "'");
  return *v;
}

std::optional<double> opt_num(const std::string& s, std::size_t line, const char* col) {
  if (s.empty()) return std::nullopt;
  return num(s, line, col);
}

long long integer(const std::string& s, std::size_t line, const char* col) {
  const auto v = parse_int(s);
  if (!v) fail(ErrorKind::malformed_input, "line " + std::to_string(line) + ": bad integer for " + col + ": '" + s + "'");
  return *v;
}

std::string json_opt(const std::optional<int>& v) { return v ? std::to_string(*v) : "null"; }

std::string json_escape(const std::string& s) {
  std::string o;
  for (char c : s) {
    if (c == '"' || c == '\\') o.push_back('\\');
    o.push_back(c);
  }
  return o;
}

}  // namespace

const std::vector<std::string>& record_quantities() {
  static const std::vector<std::string> q = {"H",         "S",  "ppl", "tau", "alpha_planned", "alpha_eff",
                                             "realized_synth_frac", "rare_token_mass", "tail_coverage", "ece"};
  return q;
}

std::optional<double> record_value(const TrajectoryRecord& r, const std::string& q) {
  if (q == "H") return r.snap.H;
  if (q == "S") return r.snap.S;
  if (q == "ppl") return r.snap.ppl;
  if (q == "tau") return r.tau;
  if (q == "alpha_planned") return r.alpha_planned;
  if (q == "alpha_eff") return r.alpha_eff;
  if (q == "realized_synth_frac") return r.realized_synth_frac;
  if (q == "rare_token_mass") return r.snap.rare_token_mass;
  if (q == "tail_coverage") return r.snap.tail_coverage;
  if (q == "ece") return r.snap.ece;
  return std::nullopt;
}

std::string format_records(const std::vector<RunResult>& runs) {
  std::string out = records_header;
  out += '\n';
  for (const auto& run : runs)
    for (const auto& r : run.records) {
      out += run.run_id + ',' + std::to_string(run.seed) + ',' + run.label + ',' + std::to_string(r.snap.g) + ',' +
             format_double(r.snap.H) + ',' + opt(r.snap.S) + ',' + format_double(r.snap.ppl) + ',' +
             format_double(r.tau) + ',' + format_double(r.alpha_planned) + ',' + format_double(r.alpha_eff) + ',' +
             format_double(r.realized_synth_frac) + ',' + opt(r.snap.rare_token_mass) + ',' +
             opt(r.snap.tail_coverage) + ',' + format_double(r.snap.ece) + ',' + (r.hidden_flag ? "1" : "0") + ',' +
             (r.visible_flag ? "1" : "0") + '\n';
    }
  return out;
}

std::vector<RunResult> parse_records(const std::string& text) {
  const auto lines = lines_of(text);
  if (lines.empty() || lines.front() != records_header)
    fail(ErrorKind::malformed_input, "records header mismatch; expected: " + std::string(records_header));
  std::vector<RunResult> runs;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const std::size_t ln = i + 1;
    const auto f = split(lines[i], ',');
    if (f.size() != 16)
      fail(ErrorKind::malformed_input, "line " + std::to_string(ln) + ": expected 16 fields, got " + std::to_string(f.size()));
    if (runs.empty() || runs.back().run_id != f[0]) {
      for (const auto& r : runs)
        if (r.run_id == f[0]) fail(ErrorKind::malformed_input, "line " + std::to_string(ln) + ": rows of run '" + f[0] + "' are not contiguous");
      runs.push_back({});
      runs.back().run_id = f[0];
      const auto seed = integer(f[1], ln, "seed");
      if (seed < 0) fail(ErrorKind::malformed_input, "line " + std::to_string(ln) + ": negative seed");
      runs.back().seed = static_cast<std::uint64_t>(seed);
      runs.back().label = f[2];
    }
    TrajectoryRecord r;
    r.snap.g = static_cast<int>(integer(f[3], ln, "gen"));
    if (r.snap.g != static_cast<int>(runs.back().records.size()))
      fail(ErrorKind::malformed_input, "line " + std::to_string(ln) + ": generations must be contiguous from 0");
    r.snap.H = num(f[4], ln, "H");
    r.snap.S = opt_num(f[5], ln, "S");
    r.snap.ppl = num(f[6], ln, "ppl");
    r.tau = num(f[7], ln, "tau");
    r.alpha_planned = num(f[8], ln, "alpha_planned");
    r.alpha_eff = num(f[9], ln, "alpha_eff");
    r.realized_synth_frac = num(f[10], ln, "realized_synth_frac");
    r.snap.rare_token_mass = opt_num(f[11], ln, "rare_token_mass");
    r.snap.tail_coverage = opt_num(f[12], ln, "tail_coverage");
    r.snap.ece = num(f[13], ln, "ece");
    r.hidden_flag = f[14] == "1";
    r.visible_flag = f[15] == "1";
    runs.back().records.push_back(std::move(r));
  }
  for (auto& run : runs) {
    for (const auto& r : run.records)
      if (!std::isfinite(r.snap.ppl) && !run.diverged_at) run.diverged_at = r.snap.g;
    apply_onsets(run);
  }
  return runs;
}

std::string format_onsets_json(const RunResult& run) {
  std::string s = "{\n";
  s += "  \"run_id\": \"" + json_escape(run.run_id) + "\",\n";
  s += "  \"mode\": \"" + json_escape(run.label) + "\",\n";
  s += "  \"seed\": " + std::to_string(run.seed) + ",\n";
  s += "  \"hidden_onset\": " + json_opt(run.onsets.hidden) + ",\n";
  s += "  \"visible_onset\": " + json_opt(run.onsets.visible) + ",\n";
  s += "  \"lead_time\": " + json_opt(run.onsets.lead_time) + ",\n";
  s += "  \"diverged_at\": " + json_opt(run.diverged_at) + ",\n";
  s += "  \"mean_alpha\": " + format_double(run.mean_alpha()) + ",\n";
  s += std::string("  \"resampled\": ") + (run.resampled ? "true" : "false") + "\n";
  s += "}\n";
  return s;
}

std::string format_recovery(const std::string& run_id, const std::vector<RecoveryResult>& results) {
  std::string out = recovery_header;
  out += '\n';
  for (const auto& r : results)
    out += run_id + ',' + std::to_string(r.checkpoint) + ',' + r.budget.name + ',' +
           format_double(r.budget.real_fraction) + ',' + std::to_string(r.budget.steps) + ',' + format_double(r.ppl) +
           ',' + format_double(r.H) + '\n';
  return out;
}

std::vector<RecoveryRow> parse_recovery(const std::string& text) {
  const auto lines = lines_of(text);
  if (lines.empty() || lines.front() != recovery_header)
    fail(ErrorKind::malformed_input, "recovery header mismatch; expected: " + std::string(recovery_header));
  std::vector<RecoveryRow> rows;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const std::size_t ln = i + 1;
    const auto f = split(lines[i], ',');
    if (f.size() != 7) fail(ErrorKind::malformed_input, "line " + std::to_string(ln) + ": expected 7 fields");
    rows.push_back({f[0], static_cast<int>(integer(f[1], ln, "checkpoint")), f[2], num(f[3], ln, "real_fraction"),
                    static_cast<int>(integer(f[4], ln, "steps")), num(f[5], ln, "ppl"), num(f[6], ln, "H")});
  }
  return rows;
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) fail(ErrorKind::io, "cannot create directory " + path.parent_path().string() + ": " + ec.message());
  }
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) fail(ErrorKind::io, "cannot open " + path.string() + " for writing");
  os << content;
  if (!os) fail(ErrorKind::io, "failed writing " + path.string());
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) fail(ErrorKind::not_found, "file " + path.string() + " not found");
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

void write_records(const std::vector<RunResult>& runs, const std::filesystem::path& path) {
  write_text_file(path, format_records(runs));
}

std::filesystem::path default_output_dir() {
  const char* env = std::getenv(output_dir_env);
  return env && *env ? std::filesystem::path(env) : std::filesystem::path("runs");
}

std::filesystem::path checkpoint_path(const std::filesystem::path& out, const std::string& run_id, int g) {
  return out / run_id / "checkpoints" / ("gen_" + std::to_string(g) + ".ckpt");
}

CheckpointSink directory_sink(const std::filesystem::path& out, const std::string& run_id) {
  std::error_code ec;
  std::filesystem::create_directories(out / run_id / "checkpoints", ec);
  if (ec) fail(ErrorKind::io, "cannot create " + (out / run_id / "checkpoints").string() + ": " + ec.message());
  return [out, run_id](const Checkpoint& ck) {
    save_checkpoint(ck, checkpoint_path(out, run_id, static_cast<int>(ck.generation)));
  };
}

CheckpointSource directory_source(const std::filesystem::path& out, const std::string& run_id) {
  return [out, run_id](int g) { return load_checkpoint(checkpoint_path(out, run_id, g)); };
}

void write_run(const std::filesystem::path& out, const RunResult& run) {
  write_records({run}, out / run.run_id / "records.csv");
  write_text_file(out / run.run_id / "onsets.json", format_onsets_json(run));
}

}  // namespace collapse
