#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "pnpsvgd/ensemble.hpp"
#include "pnpsvgd/grid.hpp"

namespace pnpsvgd {

// Matrix file layout (all little-endian):
//   bytes 0..3   "FM01"
//   bytes 4..11  rows (u64)
//   bytes 12..19 cols (u64)
//   bytes 20..   rows*cols IEEE-754 binary64, row-major
inline constexpr char kMatrixMagic[4] = {'F', 'M', '0', '1'};
inline constexpr std::size_t kMatrixHeaderBytes = 20;

struct MatrixData {
  std::uint64_t rows = 0;
  std::uint64_t cols = 0;
  std::vector<double> values;
};

std::vector<unsigned char> encode_matrix(std::uint64_t rows, std::uint64_t cols, std::span<const double> values);
MatrixData decode_matrix(std::span<const unsigned char> bytes);

void write_matrix(const std::filesystem::path& path, std::uint64_t rows, std::uint64_t cols,
                  std::span<const double> values);
void write_matrix(const std::filesystem::path& path, const Grid2D& g);
MatrixData read_matrix_data(const std::filesystem::path& path);
Grid2D read_matrix(const std::filesystem::path& path);

/// n x d matrix file plus a sidecar "<path>.shape" holding "nt nx".
void write_ensemble(const std::filesystem::path& path, const Ensemble& e);
Ensemble read_ensemble(const std::filesystem::path& path);

/// 8-bit binary PGM (P5), linearly scaled from [min, max] of the grid.
void write_pgm(const std::filesystem::path& path, const Grid2D& g);

/// Shortest round-trip decimal text, locale independent.
std::string format_double(double v);

void write_text_file(const std::filesystem::path& path, const std::string& text);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace pnpsvgd
