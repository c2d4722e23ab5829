#pragma once

// Matrix files.
//
// delimited_text: first line "rows cols", then one line per row with values
// separated by whitespace and/or commas.
// raw_binary: rows and cols as little-endian uint64, then rows*cols
// little-endian IEEE-754 doubles in row-major order.

#include <filesystem>
#include <string_view>

#include "klnmf/matrix.hpp"

namespace klnmf {

enum class MatrixFormat { delimited_text, raw_binary };

MatrixFormat parse_format(std::string_view name);

/// Loads a matrix. Non-finite entries are rejected; with `data_role` set,
/// negative entries are rejected with the offending row and column.
Matrix load_matrix(const std::filesystem::path& path, MatrixFormat format,
                   bool data_role = true);

void save_matrix(const std::filesystem::path& path, const Matrix& m,
                 MatrixFormat format);

/// n x m matrix with i.i.d. entries uniform on [lo, hi).
Matrix synth_matrix(std::size_t n, std::size_t m, double lo, double hi,
                    RandomSeed seed);

}  // namespace klnmf
