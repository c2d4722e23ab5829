#include "klnmf/trace.hpp"

#include <cstdio>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <sstream>

#include "klnmf/error.hpp"

namespace klnmf {

namespace {

constexpr const char* kColumns =
    "data_access,primal,dual,gap,res_x_yz,res_y_w,res_z_h,wall_seconds";

std::string format_optional(const std::optional<double>& v) {
  return v ? format_real(*v) : std::string();
}

double parse_real(const std::string& field) {
  char* end = nullptr;
  const double v = std::strtod(field.c_str(), &end);
  if (field.empty() || end != field.c_str() + field.size()) {
    throw Error("trace: malformed number '" + field + "'");
  }
  return v;
}

std::optional<double> parse_optional(const std::string& field) {
  if (field.empty()) return std::nullopt;
  return parse_real(field);
}

}  // namespace

void ConvergenceTrace::push_back(TraceRecord record) {
  if (!records_.empty()) {
    if (record.data_access <= records_.back().data_access) {
      throw Error("trace: data_access must be strictly increasing");
    }
    if (record.wall_seconds < records_.back().wall_seconds) {
      throw Error("trace: wall_seconds must be non-decreasing");
    }
  }
  records_.push_back(record);
}

std::string format_real(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_trace(std::ostream& out, const TraceHeader& header,
                 const ConvergenceTrace& trace) {
  for (const auto& [key, value] : header) out << "# " << key << ": " << value << '\n';
  out << kColumns << '\n';
  for (const auto& r : trace.records()) {
    out << r.data_access << ',' << format_real(r.primal) << ','
        << format_optional(r.dual) << ',' << format_optional(r.gap) << ','
        << format_optional(r.res_x_yz) << ',' << format_optional(r.res_y_w)
        << ',' << format_optional(r.res_z_h) << ','
        << format_real(r.wall_seconds) << '\n';
  }
}

std::pair<TraceHeader, ConvergenceTrace> read_trace(std::istream& in) {
  TraceHeader header;
  ConvergenceTrace trace;
  std::string line;
  bool seen_columns = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto colon = line.find(": ");
      if (colon == std::string::npos) throw Error("trace: malformed header line");
      header.emplace_back(line.substr(2, colon - 2), line.substr(colon + 2));
      continue;
    }
    if (!seen_columns) {
      if (line != kColumns) throw Error("trace: unexpected column line");
      seen_columns = true;
      continue;
    }
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    if (fields.size() != 8) throw Error("trace: expected 8 fields per row");
    TraceRecord r;
    r.data_access = static_cast<std::size_t>(std::stoull(fields[0]));
    r.primal = parse_real(fields[1]);
    r.dual = parse_optional(fields[2]);
    r.gap = parse_optional(fields[3]);
    r.res_x_yz = parse_optional(fields[4]);
    r.res_y_w = parse_optional(fields[5]);
    r.res_z_h = parse_optional(fields[6]);
    r.wall_seconds = parse_real(fields[7]);
    trace.push_back(r);
  }
  if (!seen_columns) throw Error("trace: missing column line");
  return {std::move(header), std::move(trace)};
}

}  // namespace klnmf
