#pragma once

#include <chrono>
#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace klnmf {

struct TraceRecord {
  std::size_t data_access = 0;
  double primal = 0.0;
  std::optional<double> dual;
  std::optional<double> gap;
  // ADMM only: ||X - YZ||_F, ||Y - W||_F, ||Z - H||_F.
  std::optional<double> res_x_yz;
  std::optional<double> res_y_w;
  std::optional<double> res_z_h;
  double wall_seconds = 0.0;
};

/// Per-run convergence record. data_access is strictly increasing and
/// wall_seconds non-decreasing; push_back throws otherwise.
class ConvergenceTrace {
 public:
  void push_back(TraceRecord record);

  const std::vector<TraceRecord>& records() const noexcept { return records_; }
  std::size_t size() const noexcept { return records_.size(); }
  bool empty() const noexcept { return records_.empty(); }
  const TraceRecord& front() const { return records_.front(); }
  const TraceRecord& back() const { return records_.back(); }

 private:
  std::vector<TraceRecord> records_;
};

/// Wall clock started at construction.
class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

/// Ordered key/value pairs written as '#'-prefixed lines.
using TraceHeader = std::vector<std::pair<std::string, std::string>>;

/// Real formatted with 17 significant digits.
std::string format_real(double v);

void write_trace(std::ostream& out, const TraceHeader& header,
                 const ConvergenceTrace& trace);
std::pair<TraceHeader, ConvergenceTrace> read_trace(std::istream& in);

}  // namespace klnmf
