#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace kflow {

/// Sampled diagnostics along a run. Times are strictly increasing.
class TimeSeriesRecord {
 public:
  TimeSeriesRecord() = default;
  explicit TimeSeriesRecord(std::vector<std::string> columns);

  void append(double t, std::span<const double> values);
  /// Adds a column computed after the fact; size must match times().
  void add_column(std::string name, std::vector<double> values);

  const std::vector<double>& times() const { return times_; }
  const std::vector<std::string>& names() const { return names_; }
  const std::vector<double>& column(const std::string& name) const;
  bool has_column(const std::string& name) const;
  std::size_t size() const { return times_.size(); }

  bool aborted() const { return aborted_; }
  const std::string& abort_note() const { return abort_note_; }
  void mark_aborted(std::string note);

  /// Header "time,<columns...>", values with 17 significant digits, and a
  /// trailing "# aborted: ..." line when the run was cut short.
  void write_csv(std::ostream& os) const;
  static TimeSeriesRecord read_csv(std::istream& is);

 private:
  std::vector<double> times_;
  std::vector<std::string> names_;
  std::vector<std::vector<double>> cols_;
  bool aborted_ = false;
  std::string abort_note_;
};

}  // namespace kflow
