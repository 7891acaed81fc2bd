#include "collapse/chart.hpp"

#include <algorithm>
#include <cmath>

#include "collapse/error.hpp"
#include "collapse/numfmt.hpp"
#include "collapse/records.hpp"

namespace collapse {

namespace {

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
                                "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::string f2(double v) { return format_fixed(v, 2); }

std::string escape(const std::string& s) {
  std::string o;
  for (char c : s) {
    switch (c) {
      case '&': o += "&amp;"; break;
      case '<': o += "&lt;"; break;
      case '>': o += "&gt;"; break;
      case '"': o += "&quot;"; break;
      default: o += c;
    }
  }
  return o;
}

std::string tick_label(double v) {
  const double a = std::abs(v);
  if (a != 0.0 && (a >= 1e4 || a < 1e-2)) {
    const int e = static_cast<int>(std::floor(std::log10(a)));
    return format_fixed(v / std::pow(10.0, e), 1) + "e" + std::to_string(e);
  }
  return format_fixed(v, a >= 100 ? 0 : 2);
}

}  // namespace

std::string render_chart(const std::vector<RunResult>& runs, const std::vector<std::string>& quantities,
                         const ChartOptions& opt) {
  const auto& valid = record_quantities();
  std::string valid_list;
  for (const auto& q : valid) valid_list += (valid_list.empty() ? "" : ", ") + q;
  if (quantities.empty()) fail(ErrorKind::invalid_parameter, "no quantities requested; valid names: " + valid_list);
  for (const auto& q : quantities)
    if (std::find(valid.begin(), valid.end(), q) == valid.end())
      fail(ErrorKind::invalid_parameter, "unknown quantity '" + q + "'; valid names: " + valid_list);
  if (runs.empty()) fail(ErrorKind::empty_data, "no runs to chart");
  int max_gen = 0;
  for (const auto& r : runs)
    for (const auto& rec : r.records) max_gen = std::max(max_gen, rec.snap.g);
  std::size_t max_len = 0;
  for (const auto& r : runs) max_len = std::max(max_len, r.records.size());
  if (max_len < 2) fail(ErrorKind::empty_data, "chart needs at least two generations of data");

  const double left = 70, right = 20, top = 40, gap = 50;
  const double pw = opt.width - left - right;
  const double ph = opt.panel_height;
  const double legend_h = 18.0 * static_cast<double>(runs.size()) + 30;
  const double height = top + quantities.size() * (ph + gap) + legend_h;

  std::string s;
  s += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(opt.width) + "\" height=\"" +
       f2(height) + "\" viewBox=\"0 0 " + std::to_string(opt.width) + " " + f2(height) +
       "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s += "<text x=\"" + f2(opt.width / 2.0) + "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" +
       escape(opt.title) + "</text>\n";

  auto xpos = [&](double g) { return left + pw * (max_gen == 0 ? 0.0 : g / max_gen); };

  for (std::size_t qi = 0; qi < quantities.size(); ++qi) {
    const std::string& q = quantities[qi];
    const bool logy = q == "ppl";
    const double y0 = top + qi * (ph + gap);
    double lo = INFINITY, hi = -INFINITY;
    for (const auto& r : runs)
      for (const auto& rec : r.records) {
        const auto v = record_value(rec, q);
        if (!v || !std::isfinite(*v) || (logy && *v <= 0.0)) continue;
        const double t = logy ? std::log10(*v) : *v;
        lo = std::min(lo, t);
        hi = std::max(hi, t);
      }
    if (!std::isfinite(lo)) {
      lo = 0.0;
      hi = 1.0;
    }
    if (hi - lo < 1e-12) {
      lo -= 0.5;
      hi += 0.5;
    }
    const double pad = 0.05 * (hi - lo);
    lo -= pad;
    hi += pad;
    auto ypos = [&](double v) {
      const double t = logy ? std::log10(v) : v;
      return y0 + ph * (1.0 - (t - lo) / (hi - lo));
    };

    s += "<g class=\"panel\" data-quantity=\"" + escape(q) + "\">\n";
    s += "<rect x=\"" + f2(left) + "\" y=\"" + f2(y0) + "\" width=\"" + f2(pw) + "\" height=\"" + f2(ph) +
         "\" fill=\"none\" stroke=\"#333\"/>\n";
    s += "<text x=\"" + f2(left - 55) + "\" y=\"" + f2(y0 + ph / 2) + "\" transform=\"rotate(-90 " + f2(left - 55) +
         " " + f2(y0 + ph / 2) + ")\" text-anchor=\"middle\">" + escape(q) + (logy ? " (log)" : "") + "</text>\n";
    for (int k = 0; k <= 4; ++k) {
      const double t = lo + (hi - lo) * k / 4.0;
      const double y = y0 + ph * (1.0 - k / 4.0);
      s += "<line x1=\"" + f2(left - 4) + "\" y1=\"" + f2(y) + "\" x2=\"" + f2(left) + "\" y2=\"" + f2(y) +
           "\" stroke=\"#333\"/>\n";
      s += "<text x=\"" + f2(left - 6) + "\" y=\"" + f2(y + 4) + "\" text-anchor=\"end\">" +
           tick_label(logy ? std::pow(10.0, t) : t) + "</text>\n";
    }
    const int step = std::max(1, max_gen / 12);
    for (int g = 0; g <= max_gen; g += step) {
      s += "<line x1=\"" + f2(xpos(g)) + "\" y1=\"" + f2(y0 + ph) + "\" x2=\"" + f2(xpos(g)) + "\" y2=\"" +
           f2(y0 + ph + 4) + "\" stroke=\"#333\"/>\n";
      s += "<text x=\"" + f2(xpos(g)) + "\" y=\"" + f2(y0 + ph + 16) + "\" text-anchor=\"middle\">" +
           std::to_string(g) + "</text>\n";
    }
    if (qi + 1 == quantities.size())
      s += "<text x=\"" + f2(left + pw / 2) + "\" y=\"" + f2(y0 + ph + 32) +
           "\" text-anchor=\"middle\">generation</text>\n";

    for (std::size_t ri = 0; ri < runs.size(); ++ri) {
      const auto& run = runs[ri];
      const std::string color = kPalette[ri % (sizeof kPalette / sizeof *kPalette)];
      std::string pts;
      auto flush = [&] {
        if (!pts.empty())
          s += "<polyline class=\"series\" data-run=\"" + escape(run.run_id) + "\" fill=\"none\" stroke=\"" + color +
               "\" stroke-width=\"1.5\" points=\"" + pts + "\"/>\n";
        pts.clear();
      };
      for (const auto& rec : run.records) {
        const auto v = record_value(rec, q);
        if (!v || !std::isfinite(*v) || (logy && *v <= 0.0)) {
          flush();
          continue;
        }
        if (!pts.empty()) pts += ' ';
        pts += f2(xpos(rec.snap.g)) + "," + f2(ypos(*v));
      }
      flush();
      auto marker = [&](const std::optional<int>& g, const char* kind, const char* dash) {
        if (!g) return;
        const double x = xpos(*g);
        s += "<line class=\"onset\" data-onset=\"" + std::string(kind) + "\" data-run=\"" + escape(run.run_id) +
             "\" data-gen=\"" + std::to_string(*g) + "\" x1=\"" + f2(x) + "\" y1=\"" + f2(y0) + "\" x2=\"" + f2(x) +
             "\" y2=\"" + f2(y0 + ph) + "\" stroke=\"" + color + "\" stroke-dasharray=\"" + dash + "\"/>\n";
      };
      marker(run.onsets.hidden, "hidden", "6,3");
      marker(run.onsets.visible, "visible", "2,2");
    }
    s += "</g>\n";
  }

  double ly = top + quantities.size() * (ph + gap);
  s += "<g class=\"legend\">\n";
  s += "<text x=\"" + f2(left) + "\" y=\"" + f2(ly) +
       "\">dashed: hidden onset, dotted: visible onset</text>\n";
  for (std::size_t ri = 0; ri < runs.size(); ++ri) {
    ly += 18;
    const std::string color = kPalette[ri % (sizeof kPalette / sizeof *kPalette)];
    s += "<line x1=\"" + f2(left) + "\" y1=\"" + f2(ly - 4) + "\" x2=\"" + f2(left + 24) + "\" y2=\"" + f2(ly - 4) +
         "\" stroke=\"" + color + "\" stroke-width=\"2\"/>\n";
    s += "<text x=\"" + f2(left + 30) + "\" y=\"" + f2(ly) + "\">" + escape(runs[ri].run_id) + "</text>\n";
  }
  s += "</g>\n</svg>\n";
  return s;
}

void emit_chart(const std::vector<RunResult>& runs, const std::vector<std::string>& quantities,
                const std::filesystem::path& path, const ChartOptions& opt) {
  write_text_file(path, render_chart(runs, quantities, opt));
}

}  // namespace collapse
