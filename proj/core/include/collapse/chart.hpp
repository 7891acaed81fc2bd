#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "collapse/engine.hpp"

namespace collapse {

struct ChartOptions {
  int width = 720;
  int panel_height = 220;
  std::string title = "Trajectory";
};

// One stacked panel per quantity (ppl on a log axis), one series per run, and
// dashed / dotted vertical markers at each run's hidden / visible onset.
std::string render_chart(const std::vector<RunResult>& runs, const std::vector<std::string>& quantities,
                         const ChartOptions& opt = {});

void emit_chart(const std::vector<RunResult>& runs, const std::vector<std::string>& quantities,
                const std::filesystem::path& path, const ChartOptions& opt = {});

}  // namespace collapse
