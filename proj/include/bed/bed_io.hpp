#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

#include "bed/tensor.hpp"

namespace bed {

// BED1 container: "BED1", then u32 version (1), batch, dim_rows, dim_cols, all
// little-endian, followed by batch * dim_rows * dim_cols little-endian IEEE-754
// doubles, matrices concatenated, each row-major.
inline constexpr std::uint32_t kBedVersion = 1;
inline constexpr std::size_t kBedHeaderBytes = 20;

void write_matrix_batch(const BatchedMatrix& m, std::ostream& out);
BatchedMatrix read_matrix_batch(std::istream& in);

void write_batch(const BatchedSymmetric& a, std::ostream& out);
// Reads a square batch. The payload is not symmetrized; pass it through validate().
BatchedSymmetric read_batch(std::istream& in);

// File helpers; they throw IoError when the file cannot be opened or written.
BatchedMatrix load_matrix_batch(const std::string& path);
void save_matrix_batch(const BatchedMatrix& m, const std::string& path);

}  // namespace bed
