#include "klnmf/io.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>

#include "klnmf/error.hpp"
#include "klnmf/trace.hpp"

namespace klnmf {

namespace {

static_assert(std::endian::native == std::endian::little,
              "raw_binary I/O assumes a little-endian host");

void check_entry(double v, std::size_t i, std::size_t j, bool data_role,
                 const std::filesystem::path& path) {
  if (!std::isfinite(v) || (data_role && v < 0.0)) {
    std::ostringstream msg;
    msg << path.string() << ": invalid entry " << v << " at row " << i
        << ", col " << j;
    throw Error(msg.str());
  }
}

Matrix load_text(const std::filesystem::path& path, bool data_role) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw Error(path.string() + ": empty file");
  std::istringstream dims(line);
  long long rows = 0, cols = 0;
  if (!(dims >> rows >> cols) || rows <= 0 || cols <= 0) {
    throw Error(path.string() + ": first line must be 'rows cols'");
  }
  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(rows * cols));
  std::size_t row = 0;
  while (std::getline(in, line)) {
    for (char& c : line) {
      if (c == ',') c = ' ';
    }
    std::istringstream ss(line);
    std::string token;
    std::size_t col = 0;
    while (ss >> token) {
      char* end = nullptr;
      const double v = std::strtod(token.c_str(), &end);
      if (end != token.c_str() + token.size()) {
        std::ostringstream msg;
        msg << path.string() << ": malformed value '" << token << "' at row "
            << row << ", col " << col;
        throw Error(msg.str());
      }
      check_entry(v, row, col, data_role, path);
      values.push_back(v);
      ++col;
    }
    if (col == 0) continue;
    if (col != static_cast<std::size_t>(cols)) {
      std::ostringstream msg;
      msg << path.string() << ": row " << row << " has " << col
          << " values, expected " << cols;
      throw Error(msg.str());
    }
    ++row;
  }
  if (row != static_cast<std::size_t>(rows)) {
    std::ostringstream msg;
    msg << path.string() << ": found " << row << " rows, expected " << rows;
    throw Error(msg.str());
  }
  return Matrix(static_cast<std::size_t>(rows), static_cast<std::size_t>(cols),
                std::move(values));
}

Matrix load_binary(const std::filesystem::path& path, bool data_role) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::uint64_t dims[2] = {0, 0};
  if (!in.read(reinterpret_cast<char*>(dims), sizeof dims)) {
    throw Error(path.string() + ": truncated header");
  }
  if (dims[0] == 0 || dims[1] == 0) throw Error(path.string() + ": zero dimension");
  const std::uint64_t expected = dims[0] * dims[1] * sizeof(double);
  const auto actual = std::filesystem::file_size(path) - sizeof dims;
  if (actual != expected) {
    throw Error(path.string() + ": payload size does not match dimensions");
  }
  Matrix m(dims[0], dims[1]);
  in.read(reinterpret_cast<char*>(m.data()),
          static_cast<std::streamsize>(expected));
  if (!in) throw Error(path.string() + ": truncated payload");
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) check_entry(m(i, j), i, j, data_role, path);
  }
  return m;
}

}  // namespace

MatrixFormat parse_format(std::string_view name) {
  if (name == "text" || name == "delimited_text" || name == "txt" || name == "csv") {
    return MatrixFormat::delimited_text;
  }
  if (name == "binary" || name == "raw_binary" || name == "bin") {
    return MatrixFormat::raw_binary;
  }
  throw Error("unknown matrix format '" + std::string(name) + "'");
}

Matrix load_matrix(const std::filesystem::path& path, MatrixFormat format,
                   bool data_role) {
  return format == MatrixFormat::delimited_text ? load_text(path, data_role)
                                                : load_binary(path, data_role);
}

void save_matrix(const std::filesystem::path& path, const Matrix& m,
                 MatrixFormat format) {
  if (format == MatrixFormat::delimited_text) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    out << m.rows() << ' ' << m.cols() << '\n';
    for (std::size_t i = 0; i < m.rows(); ++i) {
      for (std::size_t j = 0; j < m.cols(); ++j) {
        if (j) out << ',';
        out << format_real(m(i, j));
      }
      out << '\n';
    }
    if (!out) throw Error("write failed: " + path.string());
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  const std::uint64_t dims[2] = {m.rows(), m.cols()};
  out.write(reinterpret_cast<const char*>(dims), sizeof dims);
  out.write(reinterpret_cast<const char*>(m.data()),
            static_cast<std::streamsize>(m.size() * sizeof(double)));
  if (!out) throw Error("write failed: " + path.string());
}

Matrix synth_matrix(std::size_t n, std::size_t m, double lo, double hi,
                    RandomSeed seed) {
  if (!(lo >= 0.0) || !(hi > lo) || !std::isfinite(hi)) {
    throw Error("synth_matrix: bounds must satisfy 0 <= lo < hi");
  }
  Engine engine = make_engine(seed);
  std::uniform_real_distribution<double> uniform(lo, hi);
  Matrix out(n, m);
  for (double& v : out.values()) v = uniform(engine);
  return out;
}

}  // namespace klnmf
