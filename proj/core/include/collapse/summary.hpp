#pragma once

#include <optional>
#include <string>
#include <vector>

#include "collapse/engine.hpp"
#include "collapse/records.hpp"

namespace collapse {

enum class TableKind { controls, same_pressure, recovery, onsets };

std::optional<TableKind> parse_table_kind(const std::string& s);

inline constexpr const char* gap_marker = "missing";

struct Table {
  std::string title;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::string text() const;  // aligned, human-readable
  std::string csv() const;   // machine-readable
};

Table summarize(const std::vector<RunResult>& runs, TableKind kind);
Table summarize_recovery(const std::vector<RecoveryRow>& rows);

}  // namespace collapse
