#include "cli.hpp"

#include <CLI11.hpp>

#include "collapse/collapse.hpp"

namespace collapse {

namespace {

namespace fs = std::filesystem;

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ',') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else if (c != ' ') {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

fs::path resolve_out(const std::string& opt) { return opt.empty() ? default_output_dir() : fs::path(opt); }

void print_onsets(const RunResult& r, std::ostream& out) {
  auto g = [](const std::optional<int>& v) { return v ? std::to_string(*v) : std::string("none"); };
  out << r.run_id << ": hidden=" << g(r.onsets.hidden) << " visible=" << g(r.onsets.visible)
      << " lead=" << g(r.onsets.lead_time);
  if (r.diverged_at) out << " diverged_at=" << *r.diverged_at;
  out << '\n';
}

void write_combined(const fs::path& out, const std::vector<RunResult>& runs) {
  write_records(runs, out / "records.csv");
}

// Fills tau_source from an MTR run of the same seed when the config asks for it.
void attach_mtr_taus(std::vector<RunSpec>& specs, unsigned threads) {
  std::vector<RunSpec> mtr;
  for (const auto& s : specs) {
    RunSpec m = s;
    m.schedule.mode = ScheduleMode::mtr;
    m.label = label_mtr;
    m.run_id.clear();
    mtr.push_back(m);
  }
  const auto runs = run_many(mtr, threads);
  for (std::size_t i = 0; i < specs.size(); ++i) {
    specs[i].schedule.tau_source.clear();
    for (const auto& r : runs[i].records)
      if (r.snap.g >= 1) specs[i].schedule.tau_source.push_back(r.tau);
  }
}

int cmd_run(const std::string& config, const std::string& out_opt, std::ostream& out) {
  ExperimentConfig cfg = load_config(config);
  const fs::path dir = resolve_out(out_opt);
  write_text_file(dir / "config.resolved.json", resolved_config_json(cfg));
  if (cfg.tau_from_mtr) attach_mtr_taus(cfg.specs, cfg.threads);
  const auto runs = run_many(cfg.specs, cfg.threads, [&](const RunSpec& s) { return directory_sink(dir, s.id()); });
  for (const auto& r : runs) {
    write_run(dir, r);
    print_onsets(r, out);
  }
  write_combined(dir, runs);
  out << "wrote " << runs.size() << " run(s) to " << dir.string() << '\n';
  return 0;
}

int cmd_sweep(const std::string& config, const std::string& out_opt, bool checkpoints, std::ostream& out) {
  const ExperimentConfig cfg = load_config(config);
  const fs::path dir = resolve_out(out_opt);
  write_text_file(dir / "config.resolved.json", resolved_config_json(cfg));
  std::vector<std::uint64_t> seeds;
  for (const auto& s : cfg.specs) seeds.push_back(s.seed);
  SinkFactory sinks;
  if (checkpoints) sinks = [&](const RunSpec& s) { return directory_sink(dir, s.id()); };
  const BaselineGrid grid = baseline_grid(cfg.specs.front(), seeds, cfg.low_alpha, cfg.threads, sinks);
  for (const auto& r : grid.runs) write_run(dir, r);
  write_combined(dir, grid.runs);
  const Table controls = summarize(grid.runs, TableKind::controls);
  const Table same = summarize(grid.runs, TableKind::same_pressure);
  const Table onsets = summarize(grid.runs, TableKind::onsets);
  write_text_file(dir / "controls.txt", controls.text());
  write_text_file(dir / "controls.csv", controls.csv());
  write_text_file(dir / "same_pressure.txt", same.text());
  write_text_file(dir / "same_pressure.csv", same.csv());
  write_text_file(dir / "onsets.txt", onsets.text());
  write_text_file(dir / "onsets.csv", onsets.csv());
  out << controls.text() << '\n' << same.text() << '\n' << onsets.text();
  out << "wrote " << grid.runs.size() << " runs to " << dir.string() << '\n';
  return 0;
}

int cmd_recover(const std::string& config, const std::string& out_opt, std::ostream& out) {
  const ExperimentConfig cfg = load_config(config);
  const fs::path dir = resolve_out(out_opt);
  RunSpec source = cfg.specs.front();
  source.seed = cfg.recovery.source_seed;
  source.run_id.clear();
  const std::string id = source.id();
  bool have = true;
  for (int g : cfg.recovery.checkpoints) have = have && fs::exists(checkpoint_path(dir, id, g));
  if (!have) {
    out << "source run " << id << " has no checkpoints in " << dir.string() << "; running it\n";
    const RunResult r = run_recursive(source, directory_sink(dir, id));
    write_run(dir, r);
    print_onsets(r, out);
  }
  const auto results =
      recovery_grid(source, directory_source(dir, id), cfg.recovery.checkpoints, cfg.recovery.budgets, cfg.threads);
  const std::string csv = format_recovery(id, results);
  write_text_file(dir / id / "recovery.csv", csv);
  const Table t = summarize_recovery(parse_recovery(csv));
  write_text_file(dir / id / "recovery.txt", t.text());
  out << t.text() << "wrote " << (dir / id / "recovery.csv").string() << '\n';
  return 0;
}

int cmd_detect(const std::string& records, std::ostream& out) {
  const auto runs = parse_records(read_text_file(records));
  for (const auto& r : runs) print_onsets(r, out);
  return 0;
}

int cmd_report(const std::string& records, const std::string& table, const std::string& chart,
               const std::string& format, const std::string& runs_filter, const std::string& out_path,
               std::ostream& out) {
  const std::string text = read_text_file(records);
  std::string result;
  if (!table.empty()) {
    const auto kind = parse_table_kind(table);
    if (!kind) fail(ErrorKind::invalid_parameter, "unknown table '" + table + "'; valid: controls, same_pressure, recovery, onsets");
    Table t = *kind == TableKind::recovery ? summarize_recovery(parse_recovery(text))
                                           : summarize(parse_records(text), *kind);
    result = format == "csv" ? t.csv() : t.text();
  } else {
    auto runs = parse_records(text);
    if (!runs_filter.empty()) {
      const auto keep = split_list(runs_filter);
      std::vector<RunResult> sel;
      for (auto& r : runs)
        if (std::find(keep.begin(), keep.end(), r.run_id) != keep.end()) sel.push_back(std::move(r));
      if (sel.empty()) fail(ErrorKind::not_found, "none of the requested runs are in " + records);
      runs = std::move(sel);
    }
    ChartOptions opt;
    opt.title = fs::path(records).filename().string();
    result = render_chart(runs, split_list(chart), opt);
  }
  if (out_path.empty()) {
    out << result;
  } else {
    write_text_file(out_path, result);
    out << "wrote " << out_path << '\n';
  }
  return 0;
}

}  // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Recursive self-training collapse laboratory"};
  app.name("collapse-lab");
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  std::string config, out_dir, records, table, chart, format = "text", runs_filter, out_path;
  bool checkpoints = false;

  auto* run = app.add_subcommand("run", "run every seed of a config and write run directories");
  run->add_option("config", config, "config file (JSON)")->required();
  run->add_option("--out", out_dir, "output directory (default $COLLAPSE_LAB_OUT or ./runs)");

  auto* sweep = app.add_subcommand("sweep", "baseline grid: open_loop, mtr, fixed_low_alpha, random_tau, same-pressure");
  sweep->add_option("config", config, "config file (JSON)")->required();
  sweep->add_option("--out", out_dir, "output directory (default $COLLAPSE_LAB_OUT or ./runs)");
  sweep->add_flag("--checkpoints", checkpoints, "also write per-generation checkpoints");

  auto* recover_cmd = app.add_subcommand("recover", "fixed-budget recovery grid from an open-loop run's checkpoints");
  recover_cmd->add_option("config", config, "config file (JSON)")->required();
  recover_cmd->add_option("--out", out_dir, "output directory (default $COLLAPSE_LAB_OUT or ./runs)");

  auto* detect = app.add_subcommand("detect", "re-run onset detection on a records file");
  detect->add_option("records", records, "records.csv")->required()->check(CLI::ExistingFile);

  auto* report = app.add_subcommand("report", "summary tables and charts from a records file");
  report->add_option("records", records, "records.csv (or recovery.csv for --table recovery)")
      ->required()
      ->check(CLI::ExistingFile);
  auto* t_opt = report->add_option("--table", table, "controls | same_pressure | recovery | onsets");
  auto* c_opt = report->add_option("--chart", chart, "comma-separated quantities, e.g. H,S,ppl");
  t_opt->excludes(c_opt);
  report->add_option("--format", format, "table format")->check(CLI::IsMember({"text", "csv"}));
  report->add_option("--runs", runs_filter, "comma-separated run ids to chart");
  report->add_option("--out", out_path, "write to this file instead of stdout");

  std::vector<std::string> argv_tail(args.size() > 1 ? args.begin() + 1 : args.end(), args.end());
  std::reverse(argv_tail.begin(), argv_tail.end());
  try {
    app.parse(argv_tail);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "collapse-lab: " << e.what() << '\n' << app.help();
    return 2;
  }
  if (report->parsed() && table.empty() && chart.empty()) {
    err << "collapse-lab: report needs --table or --chart\n" << report->help();
    return 2;
  }

  try {
    if (run->parsed()) return cmd_run(config, out_dir, out);
    if (sweep->parsed()) return cmd_sweep(config, out_dir, checkpoints, out);
    if (recover_cmd->parsed()) return cmd_recover(config, out_dir, out);
    if (detect->parsed()) return cmd_detect(records, out);
    if (report->parsed()) return cmd_report(records, table, chart, format, runs_filter, out_path, out);
  } catch (const std::exception& e) {
    err << "collapse-lab: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace collapse
