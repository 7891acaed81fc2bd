#include "collapse/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "collapse/error.hpp"
#include "collapse/numfmt.hpp"
#include "collapse/records.hpp"

namespace collapse {

namespace {

using json = nlohmann::json;

[[noreturn]] void config_error(const std::string& msg) { fail(ErrorKind::config, msg); }

std::pair<std::size_t, std::size_t> line_col(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

class Section {
 public:
  Section(const json& root, const std::string& name) : name_(name) {
    if (!root.contains(name)) return;
    const json& s = root.at(name);
    if (!s.is_object()) config_error("section '" + name + "' must be an object");
    obj_ = &s;
  }

  void allow(std::initializer_list<const char*> keys) {
    for (const char* k : keys) allowed_.insert(k);
  }

  void reject_unknown() const {
    if (!obj_) return;
    for (const auto& [k, v] : obj_->items())
      if (!allowed_.count(k)) config_error("unknown key '" + name_ + "." + k + "'");
  }

  bool has(const char* key) const { return obj_ && obj_->contains(key); }
  const json& at(const char* key) const { return obj_->at(key); }
  std::string field(const char* key) const { return name_ + "." + key; }

  void get(const char* key, double& out) const {
    if (!has(key)) return;
    const json& v = at(key);
    if (!v.is_number()) config_error(field(key) + " must be a number");
    out = v.get<double>();
  }

  void get(const char* key, int& out) const {
    if (!has(key)) return;
    const json& v = at(key);
    if (!v.is_number_integer()) config_error(field(key) + " must be an integer");
    const auto x = v.get<long long>();
    if (x < INT32_MIN || x > INT32_MAX) config_error(field(key) + " is out of range");
    out = static_cast<int>(x);
  }

  void get(const char* key, std::uint64_t& out) const {
    if (!has(key)) return;
    const json& v = at(key);
    if (!v.is_number_integer() || v.get<long long>() < 0) config_error(field(key) + " must be a nonnegative integer");
    out = v.get<std::uint64_t>();
  }

  void get(const char* key, std::string& out) const {
    if (!has(key)) return;
    const json& v = at(key);
    if (!v.is_string()) config_error(field(key) + " must be a string");
    out = v.get<std::string>();
  }

  template <class T>
  void get_list(const char* key, std::vector<T>& out) const {
    if (!has(key)) return;
    const json& v = at(key);
    if (!v.is_array() || v.empty()) config_error(field(key) + " must be a non-empty array");
    out.clear();
    for (const auto& e : v) {
      if constexpr (std::is_same_v<T, std::string>) {
        if (!e.is_string()) config_error(field(key) + " entries must be strings");
      } else if constexpr (std::is_integral_v<T>) {
        if (!e.is_number_integer()) config_error(field(key) + " entries must be integers");
      } else {
        if (!e.is_number()) config_error(field(key) + " entries must be numbers");
      }
      out.push_back(e.get<T>());
    }
  }

 private:
  std::string name_;
  const json* obj_ = nullptr;
  std::set<std::string> allowed_;
};

void check(bool ok, const std::string& field, const std::string& rule) {
  if (!ok) config_error(field + " " + rule);
}

std::vector<std::uint64_t> parse_seeds(const Section& run) {
  if (run.has("seeds") && run.has("seed")) config_error("run.seed and run.seeds are mutually exclusive");
  if (!run.has("seeds")) {
    std::uint64_t s = 0;
    run.get("seed", s);
    return {s};
  }
  const json& v = run.at("seeds");
  if (v.is_string()) {
    try {
      return expand_seed_range(v.get<std::string>());
    } catch (const Error& e) {
      config_error(std::string("run.seeds: ") + e.what());
    }
  }
  if (!v.is_array() || v.empty()) config_error("run.seeds must be a non-empty array or an \"a..b\" range");
  std::vector<std::uint64_t> out;
  for (const auto& e : v) {
    if (e.is_string()) {
      const auto r = expand_seed_range(e.get<std::string>());
      out.insert(out.end(), r.begin(), r.end());
    } else if (e.is_number_integer() && e.get<long long>() >= 0) {
      out.push_back(e.get<std::uint64_t>());
    } else {
      config_error("run.seeds entries must be nonnegative integers or \"a..b\" ranges");
    }
  }
  return out;
}

std::vector<double> tau_from_records(const std::filesystem::path& path, std::uint64_t seed) {
  std::ifstream is(path);
  if (!is) config_error("schedule.tau_source: cannot open " + path.string());
  std::stringstream ss;
  ss << is.rdbuf();
  const auto runs = parse_records(ss.str());
  const RunResult* pick = nullptr;
  for (const auto& r : runs)
    if (r.seed == seed && r.label == label_mtr) pick = &r;
  if (!pick)
    for (const auto& r : runs)
      if (r.seed == seed) pick = &r;
  if (!pick && runs.size() == 1) pick = &runs.front();
  if (!pick) config_error("schedule.tau_source: no run for seed " + std::to_string(seed) + " in " + path.string());
  std::vector<double> taus;
  for (const auto& rec : pick->records)
    if (rec.snap.g >= 1) taus.push_back(rec.tau);
  if (taus.empty()) config_error("schedule.tau_source: run has no generations >= 1");
  return taus;
}

}  // namespace

std::vector<std::uint64_t> expand_seed_range(const std::string& s) {
  const auto dots = s.find("..");
  if (dots == std::string::npos) {
    const auto v = parse_int(s);
    if (!v || *v < 0) fail(ErrorKind::config, "invalid seed '" + s + "'");
    return {static_cast<std::uint64_t>(*v)};
  }
  const auto a = parse_int(std::string_view(s).substr(0, dots));
  const auto b = parse_int(std::string_view(s).substr(dots + 2));
  if (!a || !b || *a < 0 || *b < *a) fail(ErrorKind::config, "invalid seed range '" + s + "'");
  if (*b - *a > 100000) fail(ErrorKind::config, "seed range '" + s + "' is too large");
  std::vector<std::uint64_t> out;
  for (long long i = *a; i <= *b; ++i) out.push_back(static_cast<std::uint64_t>(i));
  return out;
}

ExperimentConfig parse_config(const std::string& text, const std::filesystem::path& base_dir) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    const auto [line, col] = line_col(text, e.byte == 0 ? 0 : e.byte - 1);
    std::string msg = e.what();
    const auto p = msg.find("parse error");
    if (p != std::string::npos) msg = msg.substr(p);
    config_error("line " + std::to_string(line) + ", column " + std::to_string(col) + ": " + msg);
  }
  if (!root.is_object()) config_error("top level must be an object");
  static const std::set<std::string> sections = {"learner", "world", "run", "schedule", "monitor", "recovery"};
  for (const auto& [k, v] : root.items())
    if (!sections.count(k)) config_error("unknown section '" + k + "'");

  RunSpec spec;
  ExperimentConfig cfg;

  // learner
  Section learner(root, "learner");
  std::string kind = "markov";
  learner.get("kind", kind);
  if (kind == "markov") {
    spec.kind = LearnerKind::markov;
    learner.allow({"kind", "V", "k", "lambda", "retention", "epochs", "prompt_tokens", "top_p", "temperature"});
    learner.get("V", spec.text_world.vocab);
    learner.get("k", spec.markov.order);
    learner.get("lambda", spec.markov.smoothing);
    learner.get("retention", spec.markov.retention);
    learner.get("epochs", spec.markov.epochs);
    learner.get("prompt_tokens", spec.markov.prompt_tokens);
    learner.get("top_p", spec.markov.top_p);
    learner.get("temperature", spec.markov.temperature);
    check(spec.text_world.vocab >= 2, "learner.V", "must be >= 2");
    check(spec.markov.order >= 1 && spec.markov.order <= 6, "learner.k", "must be in [1, 6]");
    check(spec.markov.smoothing > 0.0, "learner.lambda", "must be > 0");
    check(spec.markov.retention >= 0.0 && spec.markov.retention <= 1.0, "learner.retention", "must be in [0, 1]");
    check(spec.markov.epochs >= 1, "learner.epochs", "must be >= 1");
    check(spec.markov.prompt_tokens >= 0, "learner.prompt_tokens", "must be >= 0");
    check(spec.markov.top_p > 0.0 && spec.markov.top_p <= 1.0, "learner.top_p", "must be in (0, 1]");
    check(spec.markov.temperature > 0.0, "learner.temperature", "must be > 0");
  } else if (kind == "softmax") {
    spec.kind = LearnerKind::softmax;
    learner.allow({"kind", "C", "d", "eta", "initial_steps", "steps", "sharpen_temperature"});
    learner.get("C", spec.feature_world.classes);
    learner.get("d", spec.feature_world.dim);
    learner.get("eta", spec.softmax.learning_rate);
    learner.get("initial_steps", spec.softmax.initial_steps);
    learner.get("steps", spec.softmax.steps);
    learner.get("sharpen_temperature", spec.softmax.sharpen_temperature);
    check(spec.feature_world.classes >= 2, "learner.C", "must be >= 2");
    check(spec.feature_world.dim >= 1, "learner.d", "must be >= 1");
    check(spec.softmax.learning_rate > 0.0, "learner.eta", "must be > 0");
    check(spec.softmax.initial_steps >= 0, "learner.initial_steps", "must be >= 0");
    check(spec.softmax.steps >= 0, "learner.steps", "must be >= 0");
    check(spec.softmax.sharpen_temperature > 0.0, "learner.sharpen_temperature", "must be > 0");
  } else {
    config_error("learner.kind must be \"markov\" or \"softmax\"");
  }
  learner.reject_unknown();

  // world
  Section world(root, "world");
  if (spec.kind == LearnerKind::markov) {
    world.allow({"seed", "order", "dominant_min", "dominant_max", "tail", "tail_concentration", "zipf",
                 "opening_concentration"});
    world.get("seed", spec.text_world.seed);
    spec.text_world.order = spec.markov.order;
    world.get("order", spec.text_world.order);
    world.get("dominant_min", spec.text_world.dominant_min);
    world.get("dominant_max", spec.text_world.dominant_max);
    world.get("tail", spec.text_world.tail);
    world.get("tail_concentration", spec.text_world.tail_concentration);
    world.get("zipf", spec.text_world.zipf);
    world.get("opening_concentration", spec.text_world.opening_concentration);
    const auto& w = spec.text_world;
    check(w.order >= 1 && w.order <= 4, "world.order", "must be in [1, 4]");
    check(w.dominant_min > 0.0 && w.dominant_min <= w.dominant_max && w.dominant_max <= 1.0, "world.dominant_min",
          "and world.dominant_max must satisfy 0 < min <= max <= 1");
    check(w.tail >= 0 && w.tail < w.vocab, "world.tail", "must be in [0, V-1]");
    check(w.tail_concentration > 0.0, "world.tail_concentration", "must be > 0");
    check(w.zipf >= 0.0, "world.zipf", "must be >= 0");
    check(w.opening_concentration > 0.0, "world.opening_concentration", "must be > 0");
  } else {
    world.allow({"seed", "separation", "noise", "prior_zipf", "low_support"});
    world.get("seed", spec.feature_world.seed);
    world.get("separation", spec.feature_world.separation);
    world.get("noise", spec.feature_world.noise);
    world.get("prior_zipf", spec.feature_world.prior_zipf);
    world.get("low_support", spec.feature_world.low_support);
    const auto& w = spec.feature_world;
    check(w.separation > 0.0, "world.separation", "must be > 0");
    check(w.noise > 0.0, "world.noise", "must be > 0");
    check(w.prior_zipf >= 0.0, "world.prior_zipf", "must be >= 0");
    check(w.low_support >= 1 && w.low_support < w.classes, "world.low_support", "must be in [1, C)");
  }
  world.reject_unknown();

  // run
  Section run(root, "run");
  run.allow({"seed", "seeds", "generations", "train_size", "synthetic_pool", "real_pool", "validation", "anchors",
             "seq_len", "threads", "label"});
  const auto seeds = parse_seeds(run);
  run.get("generations", spec.generations);
  run.get("train_size", spec.train_size);
  run.get("synthetic_pool", spec.synthetic_pool);
  int real_pool = spec.kind == LearnerKind::markov ? spec.text_world.real_pool : spec.feature_world.real_pool;
  int validation = spec.kind == LearnerKind::markov ? spec.text_world.validation : spec.feature_world.validation;
  int anchors = spec.kind == LearnerKind::markov ? spec.text_world.anchors : spec.feature_world.anchors;
  run.get("real_pool", real_pool);
  run.get("validation", validation);
  run.get("anchors", anchors);
  if (spec.kind == LearnerKind::markov) {
    run.get("seq_len", spec.text_world.seq_len);
    check(spec.text_world.seq_len >= 2, "run.seq_len", "must be >= 2");
  } else if (run.has("seq_len")) {
    config_error("run.seq_len applies only to the markov learner");
  }
  int threads = 0;
  run.get("threads", threads);
  std::string label;
  run.get("label", label);
  run.reject_unknown();
  check(spec.generations >= 1, "run.generations", "must be >= 1");
  check(spec.train_size >= 1, "run.train_size", "must be >= 1");
  check(spec.synthetic_pool >= 0, "run.synthetic_pool", "must be >= 0 (0 means train_size)");
  check(real_pool >= 1, "run.real_pool", "must be >= 1");
  check(validation >= 1, "run.validation", "must be >= 1");
  check(anchors >= 1, "run.anchors", "must be >= 1");
  check(threads >= 0, "run.threads", "must be >= 0");
  cfg.threads = static_cast<unsigned>(threads);
  spec.text_world.real_pool = spec.feature_world.real_pool = real_pool;
  spec.text_world.validation = spec.feature_world.validation = validation;
  spec.text_world.anchors = spec.feature_world.anchors = anchors;

  // schedule
  Section sched(root, "schedule");
  sched.allow({"mode", "planned_alpha", "fixed_alpha", "tau_source", "low_alpha"});
  std::string mode = "open_loop";
  sched.get("mode", mode);
  const auto m = parse_schedule_mode(mode);
  if (!m) config_error("schedule.mode must be one of open_loop, mtr, fixed_alpha, random_tau");
  spec.schedule.mode = *m;
  sched.get_list("planned_alpha", spec.schedule.planned);
  for (double a : spec.schedule.planned) check(a >= 0.0 && a <= 1.0, "schedule.planned_alpha", "entries must be in [0, 1]");
  sched.get("fixed_alpha", spec.schedule.fixed_alpha);
  check(spec.schedule.fixed_alpha >= 0.0 && spec.schedule.fixed_alpha <= 1.0, "schedule.fixed_alpha",
        "must be in [0, 1]");
  sched.get("low_alpha", cfg.low_alpha);
  check(cfg.low_alpha >= 0.0 && cfg.low_alpha <= 1.0, "schedule.low_alpha", "must be in [0, 1]");
  std::string tau_src;
  if (sched.has("tau_source") && sched.at("tau_source").is_array()) {
    sched.get_list("tau_source", spec.schedule.tau_source);
    for (double t : spec.schedule.tau_source)
      check(t >= trust_floor && t <= trust_ceiling, "schedule.tau_source", "values must be in [0.2, 1]");
  } else {
    sched.get("tau_source", tau_src);
  }
  sched.reject_unknown();
  cfg.tau_from_mtr = tau_src == "mtr";

  // monitor
  Section mon(root, "monitor");
  mon.allow({"window", "epsilon", "rare_percentile", "ece_bins", "tail_threshold"});
  mon.get("window", spec.monitor.window);
  mon.get("epsilon", spec.monitor.epsilon);
  mon.get("rare_percentile", spec.monitor.rare_percentile);
  mon.get("ece_bins", spec.monitor.ece_bins);
  mon.get("tail_threshold", spec.monitor.tail_threshold);
  mon.reject_unknown();
  check(spec.monitor.window >= 1, "monitor.window", "must be >= 1");
  check(spec.monitor.epsilon > 0.0, "monitor.epsilon", "must be > 0");
  check(spec.monitor.rare_percentile > 0.0 && spec.monitor.rare_percentile < 100.0, "monitor.rare_percentile",
        "must be in (0, 100)");
  check(spec.monitor.ece_bins >= 1, "monitor.ece_bins", "must be >= 1");
  check(spec.monitor.tail_threshold > 0.0 && spec.monitor.tail_threshold < 1.0, "monitor.tail_threshold",
        "must be in (0, 1)");

  // recovery
  Section rec(root, "recovery");
  rec.allow({"checkpoints", "real_fractions", "steps", "budget_names", "source_seed"});
  rec.get_list("checkpoints", cfg.recovery.checkpoints);
  std::vector<double> fractions;
  std::vector<int> steps;
  std::vector<std::string> names;
  for (const auto& b : cfg.recovery.budgets) {
    fractions.push_back(b.real_fraction);
    steps.push_back(b.steps);
    names.push_back(b.name);
  }
  const bool custom = rec.has("real_fractions") || rec.has("steps");
  rec.get_list("real_fractions", fractions);
  rec.get_list("steps", steps);
  if (custom && !rec.has("budget_names")) {
    names.clear();
    for (std::size_t i = 0; i < fractions.size(); ++i) names.push_back("budget" + std::to_string(i + 1));
  }
  rec.get_list("budget_names", names);
  cfg.recovery.source_seed = seeds.front();
  rec.get("source_seed", cfg.recovery.source_seed);
  rec.reject_unknown();
  if (fractions.size() != steps.size() || names.size() != steps.size())
    config_error("recovery.real_fractions, recovery.steps and recovery.budget_names must have equal lengths");
  cfg.recovery.budgets.clear();
  for (std::size_t i = 0; i < steps.size(); ++i) {
    check(fractions[i] > 0.0 && fractions[i] <= 1.0, "recovery.real_fractions", "entries must be in (0, 1]");
    check(steps[i] >= 0, "recovery.steps", "entries must be >= 0");
    cfg.recovery.budgets.push_back({names[i], fractions[i], steps[i]});
  }
  for (int g : cfg.recovery.checkpoints) check(g >= 0, "recovery.checkpoints", "entries must be >= 0");

  const std::string default_label = to_string(spec.schedule.mode);
  spec.label = label.empty() ? default_label : label;
  for (auto s : seeds) {
    RunSpec r = spec;
    r.seed = s;
    if (!tau_src.empty() && tau_src != "mtr") {
      std::filesystem::path p = tau_src;
      if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
      r.schedule.tau_source = tau_from_records(p, s);
    }
    if (r.schedule.mode == ScheduleMode::random_tau && r.schedule.tau_source.empty() && !cfg.tau_from_mtr)
      config_error("schedule.tau_source is required for random_tau mode (array, records path, or \"mtr\")");
    cfg.specs.push_back(std::move(r));
  }
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) fail(ErrorKind::not_found, "config file " + path.string() + " not found");
  std::stringstream ss;
  ss << is.rdbuf();
  try {
    return parse_config(ss.str(), path.parent_path());
  } catch (const Error& e) {
    fail(e.kind(), path.string() + ": " + e.what());
  }
}

std::string resolved_config_json(const ExperimentConfig& cfg) {
  if (cfg.specs.empty()) return "{}";
  const RunSpec& s = cfg.specs.front();
  json j;
  if (s.kind == LearnerKind::markov) {
    j["learner"] = {{"kind", "markov"},
                    {"V", s.text_world.vocab},
                    {"k", s.markov.order},
                    {"lambda", s.markov.smoothing},
                    {"retention", s.markov.retention},
                    {"epochs", s.markov.epochs},
                    {"prompt_tokens", s.markov.prompt_tokens},
                    {"top_p", s.markov.top_p},
                    {"temperature", s.markov.temperature}};
    j["world"] = {{"seed", s.text_world.seed},
                  {"order", s.text_world.order},
                  {"dominant_min", s.text_world.dominant_min},
                  {"dominant_max", s.text_world.dominant_max},
                  {"tail", s.text_world.tail},
                  {"tail_concentration", s.text_world.tail_concentration},
                  {"zipf", s.text_world.zipf},
                  {"opening_concentration", s.text_world.opening_concentration}};
  } else {
    j["learner"] = {{"kind", "softmax"},
                    {"C", s.feature_world.classes},
                    {"d", s.feature_world.dim},
                    {"eta", s.softmax.learning_rate},
                    {"initial_steps", s.softmax.initial_steps},
                    {"steps", s.softmax.steps},
                    {"sharpen_temperature", s.softmax.sharpen_temperature}};
    j["world"] = {{"seed", s.feature_world.seed},
                  {"separation", s.feature_world.separation},
                  {"noise", s.feature_world.noise},
                  {"prior_zipf", s.feature_world.prior_zipf},
                  {"low_support", s.feature_world.low_support}};
  }
  std::vector<std::uint64_t> seeds;
  for (const auto& r : cfg.specs) seeds.push_back(r.seed);
  const bool text = s.kind == LearnerKind::markov;
  j["run"] = {{"seeds", seeds},
              {"label", s.label},
              {"generations", s.generations},
              {"train_size", s.train_size},
              {"synthetic_pool", static_cast<int>(s.pool_size())},
              {"real_pool", text ? s.text_world.real_pool : s.feature_world.real_pool},
              {"validation", text ? s.text_world.validation : s.feature_world.validation},
              {"anchors", text ? s.text_world.anchors : s.feature_world.anchors},
              {"threads", cfg.threads}};
  if (text) j["run"]["seq_len"] = s.text_world.seq_len;
  j["schedule"] = {{"mode", to_string(s.schedule.mode)},
                   {"planned_alpha", s.schedule.planned},
                   {"fixed_alpha", s.schedule.fixed_alpha},
                   {"low_alpha", cfg.low_alpha}};
  if (cfg.tau_from_mtr)
    j["schedule"]["tau_source"] = "mtr";
  else if (!s.schedule.tau_source.empty())
    j["schedule"]["tau_source"] = s.schedule.tau_source;
  j["monitor"] = {{"window", s.monitor.window},
                  {"epsilon", s.monitor.epsilon},
                  {"rare_percentile", s.monitor.rare_percentile},
                  {"ece_bins", s.monitor.ece_bins},
                  {"tail_threshold", s.monitor.tail_threshold}};
  std::vector<double> fr;
  std::vector<int> st;
  std::vector<std::string> nm;
  for (const auto& b : cfg.recovery.budgets) {
    fr.push_back(b.real_fraction);
    st.push_back(b.steps);
    nm.push_back(b.name);
  }
  j["recovery"] = {{"checkpoints", cfg.recovery.checkpoints},
                   {"real_fractions", fr},
                   {"steps", st},
                   {"budget_names", nm},
                   {"source_seed", cfg.recovery.source_seed}};
  return j.dump(2) + "\n";
}

}  // namespace collapse
