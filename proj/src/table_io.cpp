#include "lakevort/table_io.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

#include "lakevort/error.hpp"

namespace lakevort {

std::string format_number(double v) {
  std::ostringstream os;
  os << std::setprecision(12) << v;
  return os.str();
}

void write_table(const std::string& path, const Table& rows, const std::vector<std::string>& comments) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::Experiment, "cannot write " + path);
  for (const auto& c : comments) out << "# " << c << '\n';
  for (const auto& row : rows) {
    for (std::size_t k = 0; k < row.size(); ++k) {
      if (k) out << ' ';
      out << format_number(row[k]);
    }
    out << '\n';
  }
  if (!out) throw Error(ErrorKind::Experiment, "failed writing " + path);
}

Table read_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Experiment, "cannot read " + path);
  Table rows;
  std::string line;
  while (std::getline(in, line)) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream is(line);
    std::vector<double> row;
    double v = 0.0;
    while (is >> v) row.push_back(v);
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace lakevort
