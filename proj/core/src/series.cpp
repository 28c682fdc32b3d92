#include "kflow/series.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

#include "kflow/error.hpp"

namespace kflow {

TimeSeriesRecord::TimeSeriesRecord(std::vector<std::string> columns)
    : names_(std::move(columns)), cols_(names_.size()) {}

void TimeSeriesRecord::append(double t, std::span<const double> values) {
  if (values.size() != names_.size()) throw ValidationError("series: column count mismatch");
  if (!times_.empty() && !(t > times_.back())) {
    throw ValidationError("series: times must be strictly increasing");
  }
  for (double v : values) {
    if (std::isnan(v)) throw NumericalError("series: NaN sample", t);
  }
  times_.push_back(t);
  for (std::size_t i = 0; i < values.size(); ++i) cols_[i].push_back(values[i]);
}

void TimeSeriesRecord::add_column(std::string name, std::vector<double> values) {
  if (values.size() != times_.size()) throw ValidationError("series: column length mismatch");
  names_.push_back(std::move(name));
  cols_.push_back(std::move(values));
}

bool TimeSeriesRecord::has_column(const std::string& name) const {
  return std::find(names_.begin(), names_.end(), name) != names_.end();
}

const std::vector<double>& TimeSeriesRecord::column(const std::string& name) const {
  const auto it = std::find(names_.begin(), names_.end(), name);
  if (it == names_.end()) throw ValidationError("series: no column '" + name + "'");
  return cols_[static_cast<std::size_t>(it - names_.begin())];
}

void TimeSeriesRecord::mark_aborted(std::string note) {
  aborted_ = true;
  abort_note_ = std::move(note);
}

void TimeSeriesRecord::write_csv(std::ostream& os) const {
  os << "time";
  for (const auto& n : names_) os << ',' << n;
  os << '\n';
  const auto old = os.precision(17);
  for (std::size_t r = 0; r < times_.size(); ++r) {
    os << times_[r];
    for (const auto& c : cols_) os << ',' << c[r];
    os << '\n';
  }
  os.precision(old);
  if (aborted_) os << "# aborted: " << abort_note_ << '\n';
}

TimeSeriesRecord TimeSeriesRecord::read_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw ValidationError("series csv: empty input");
  std::vector<std::string> header;
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) header.push_back(cell);
  }
  if (header.empty() || header.front() != "time") throw ValidationError("series csv: bad header");
  TimeSeriesRecord rec(std::vector<std::string>(header.begin() + 1, header.end()));
  std::vector<double> row(header.size() - 1);
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (line.rfind("# aborted: ", 0) == 0) {
      rec.mark_aborted(line.substr(11));
      continue;
    }
    std::stringstream ss(line);
    std::string cell;
    std::getline(ss, cell, ',');
    const double t = std::stod(cell);
    for (auto& v : row) {
      if (!std::getline(ss, cell, ',')) throw ValidationError("series csv: short row");
      v = std::stod(cell);
    }
    rec.append(t, row);
  }
  return rec;
}

}  // namespace kflow
