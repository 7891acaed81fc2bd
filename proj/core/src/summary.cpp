#include "collapse/summary.hpp"

#include <algorithm>
#include <cmath>
#include <charconv>

#include "collapse/error.hpp"
#include "collapse/numfmt.hpp"

namespace collapse {

std::optional<TableKind> parse_table_kind(const std::string& s) {
  if (s == "controls") return TableKind::controls;
  if (s == "same_pressure") return TableKind::same_pressure;
  if (s == "recovery") return TableKind::recovery;
  if (s == "onsets") return TableKind::onsets;
  return std::nullopt;
}

namespace {

std::string num(double v) {
  if (!std::isfinite(v)) return format_fixed(v, 0);
  const double a = std::abs(v);
  if (a != 0.0 && (a >= 1e5 || a < 1e-3)) {
    char buf[64];
    auto r = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::scientific, 3);
    return std::string(buf, r.ptr);
  }
  return format_fixed(v, 3);
}

std::string pm(double m, double s) { return num(m) + " ± " + num(s); }

std::string q_cell(const std::optional<Quartiles>& q, bool median) {
  if (!q) return "none";
  if (median) return format_fixed(q->median, 1);
  return format_fixed(q->q1, 1) + "–" + format_fixed(q->q3, 1);
}

std::string opt_gen(const std::optional<int>& g) { return g ? std::to_string(*g) : "none"; }

// Display width in code points (cells contain a few multi-byte symbols).
std::size_t width(const std::string& s) {
  std::size_t n = 0;
  for (unsigned char c : s) n += (c & 0xC0) != 0x80 ? 1 : 0;
  return n;
}

}  // namespace

std::string Table::text() const {
  std::vector<std::size_t> w(header.size(), 0);
  for (std::size_t i = 0; i < header.size(); ++i) w[i] = width(header[i]);
  for (const auto& r : rows)
    for (std::size_t i = 0; i < r.size() && i < w.size(); ++i) w[i] = std::max(w[i], width(r[i]));
  auto line = [&](const std::vector<std::string>& cells) {
    std::string s;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) s += "  ";
      s += cells[i];
      if (i + 1 < cells.size()) s += std::string(w[i] - width(cells[i]), ' ');
    }
    return s + '\n';
  };
  std::string out = title + '\n';
  out += line(header);
  std::size_t total = 0;
  for (std::size_t x : w) total += x;
  out += std::string(total + 2 * (w.empty() ? 0 : w.size() - 1), '-') + '\n';
  for (const auto& r : rows) out += line(r);
  return out;
}

std::string Table::csv() const {
  auto esc = [](const std::string& s) {
    if (s.find_first_of(",\"") == std::string::npos) return s;
    std::string o = "\"";
    for (char c : s) {
      if (c == '"') o += '"';
      o += c;
    }
    return o + '"';
  };
  std::string out;
  for (std::size_t i = 0; i < header.size(); ++i) out += (i ? "," : "") + esc(header[i]);
  out += '\n';
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < r.size(); ++i) out += (i ? "," : "") + esc(r[i]);
    out += '\n';
  }
  return out;
}

Table summarize(const std::vector<RunResult>& runs, TableKind kind) {
  const auto summaries = aggregate(runs);
  auto find = [&](const char* label) -> const ModeSummary* {
    for (const auto& m : summaries)
      if (m.label == label) return &m;
    return nullptr;
  };
  Table t;
  switch (kind) {
    case TableKind::controls: {
      t.title = "Control baselines";
      t.header = {"Baseline", "Final PPL", "Final H", "Mean alpha", "Collapse frac.", "Runs"};
      for (const char* label : {label_open_loop, label_mtr, label_fixed_low, label_random_tau}) {
        const ModeSummary* m = find(label);
        if (!m || m->runs == 0) {
          t.rows.push_back({label, gap_marker, gap_marker, gap_marker, gap_marker, "0"});
          continue;
        }
        t.rows.push_back({label, pm(m->final_ppl_mean, m->final_ppl_std), pm(m->final_H_mean, m->final_H_std),
                          pm(m->alpha_mean, m->alpha_std), format_fixed(m->collapse_fraction, 2),
                          std::to_string(m->runs) + (m->single_sample ? " (single sample)" : "")});
      }
      break;
    }
    case TableKind::same_pressure: {
      const ModeSummary* fixed = find(label_same_pressure);
      t.title = "Same-pressure comparison";
      if (fixed && fixed->runs > 0) t.title += " (fixed alpha = " + format_fixed(fixed->alpha_mean, 3) + ")";
      t.header = {"Method", "Final PPL", "Final H", "Mean alpha", "Collapse fraction"};
      for (const char* label : {label_mtr, label_same_pressure}) {
        const ModeSummary* m = find(label);
        if (!m || m->runs == 0) {
          t.rows.push_back({label, gap_marker, gap_marker, gap_marker, gap_marker});
          continue;
        }
        t.rows.push_back({label, pm(m->final_ppl_mean, m->final_ppl_std), pm(m->final_H_mean, m->final_H_std),
                          pm(m->alpha_mean, m->alpha_std),
                          std::to_string(m->collapsed) + "/" + std::to_string(m->runs)});
      }
      break;
    }
    case TableKind::onsets: {
      std::vector<RunResult> open;
      for (const auto& r : runs)
        if (r.label == label_open_loop) open.push_back(r);
      const auto& use = open.empty() ? runs : open;
      const OnsetStats s = onset_statistics(use);
      t.title = "Onset statistics (" + std::string(open.empty() ? "all runs" : "open_loop runs") + ")";
      t.header = {"Run", "Hidden onset", "Visible onset", "Lead time"};
      for (std::size_t i = 0; i < s.per_run.size(); ++i)
        t.rows.push_back({s.run_ids[i], opt_gen(s.per_run[i].hidden), opt_gen(s.per_run[i].visible),
                          opt_gen(s.per_run[i].lead_time)});
      t.rows.push_back({"median", q_cell(s.hidden_q, true), q_cell(s.visible_q, true), q_cell(s.lead_q, true)});
      t.rows.push_back({"IQR", q_cell(s.hidden_q, false), q_cell(s.visible_q, false), q_cell(s.lead_q, false)});
      t.rows.push_back({"ordering", std::to_string(s.ordered) + "/" + std::to_string(s.per_run.size()),
                        "no visible onset: " + std::to_string(s.without_visible), ""});
      break;
    }
    case TableKind::recovery:
      fail(ErrorKind::invalid_parameter, "recovery tables are built from a recovery file");
  }
  return t;
}

Table summarize_recovery(const std::vector<RecoveryRow>& rows) {
  std::vector<int> cks;
  std::vector<std::pair<std::string, std::string>> budgets;  // name, header label
  for (const auto& r : rows) {
    if (std::find(cks.begin(), cks.end(), r.checkpoint) == cks.end()) cks.push_back(r.checkpoint);
    const std::string label = r.budget + " (" + format_fixed(r.real_fraction * 100.0, 1) + "% real, " +
                              std::to_string(r.steps) + " steps)";
    if (std::find_if(budgets.begin(), budgets.end(), [&](const auto& b) { return b.first == r.budget; }) ==
        budgets.end())
      budgets.emplace_back(r.budget, label);
  }
  std::sort(cks.begin(), cks.end());
  Table t;
  t.title = "Recovery validation perplexity under fixed budgets";
  t.header = {"Checkpoint"};
  for (const auto& b : budgets) t.header.push_back(b.second);
  for (int g : cks) {
    std::vector<std::string> row = {"g" + std::to_string(g)};
    for (const auto& b : budgets) {
      auto it = std::find_if(rows.begin(), rows.end(),
                             [&](const RecoveryRow& r) { return r.checkpoint == g && r.budget == b.first; });
      row.push_back(it == rows.end() ? gap_marker : format_fixed(it->ppl, 2));
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

}  // namespace collapse
