#pragma once

#include <string>
#include <vector>

#include "lakevort/lake.hpp"

namespace lakevort {

using Table = std::vector<std::vector<double>>;

// Whitespace-delimited rows; `comments` become leading `# ` lines.
void write_table(const std::string& path, const Table& rows, const std::vector<std::string>& comments = {});
// Numeric rows, skipping blank and `#` lines.
Table read_table(const std::string& path);

std::string format_number(double v);

}  // namespace lakevort
