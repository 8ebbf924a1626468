#include "pnpsvgd/matrix_io.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <sstream>

#include "pnpsvgd/errors.hpp"

namespace pnpsvgd {
namespace {

void put_u64(std::vector<unsigned char>& out, std::uint64_t v) {
  for (int b = 0; b < 8; ++b) out.push_back(static_cast<unsigned char>((v >> (8 * b)) & 0xFFu));
}

std::uint64_t get_u64(std::span<const unsigned char> bytes, std::size_t at) {
  std::uint64_t v = 0;
  for (int b = 0; b < 8; ++b) v |= static_cast<std::uint64_t>(bytes[at + static_cast<std::size_t>(b)]) << (8 * b);
  return v;
}

std::vector<unsigned char> read_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string() + " for reading");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_bytes(const std::filesystem::path& path, std::span<const unsigned char> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("failed writing " + path.string());
}

std::filesystem::path shape_sidecar(const std::filesystem::path& path) {
  std::filesystem::path p = path;
  p += ".shape";
  return p;
}

}  // namespace

std::vector<unsigned char> encode_matrix(std::uint64_t rows, std::uint64_t cols, std::span<const double> values) {
  if (values.size() != rows * cols) throw ShapeError("encode_matrix: value count does not match rows x cols");
  std::vector<unsigned char> out;
  out.reserve(kMatrixHeaderBytes + 8 * values.size());
  out.insert(out.end(), std::begin(kMatrixMagic), std::end(kMatrixMagic));
  put_u64(out, rows);
  put_u64(out, cols);
  for (double v : values) put_u64(out, std::bit_cast<std::uint64_t>(v));
  return out;
}

MatrixData decode_matrix(std::span<const unsigned char> bytes) {
  if (bytes.size() < 4) throw FormatError("truncated matrix header", bytes.size());
  if (!std::equal(std::begin(kMatrixMagic), std::end(kMatrixMagic), bytes.begin()))
    throw FormatError("bad matrix magic", 0);
  if (bytes.size() < kMatrixHeaderBytes) throw FormatError("truncated matrix header", bytes.size());
  MatrixData m;
  m.rows = get_u64(bytes, 4);
  m.cols = get_u64(bytes, 12);
  if (m.rows == 0 || m.cols == 0) throw FormatError("matrix dimensions must be positive", 4);
  const std::uint64_t slots = (bytes.size() - kMatrixHeaderBytes) / 8;
  if (m.cols > slots || m.rows > slots / m.cols) throw FormatError("truncated matrix payload", bytes.size());
  const std::size_t expected = kMatrixHeaderBytes + static_cast<std::size_t>(8 * m.rows * m.cols);
  if (bytes.size() < expected) throw FormatError("truncated matrix payload", bytes.size());
  if (bytes.size() > expected) throw FormatError("trailing bytes after matrix payload", expected);
  m.values.resize(m.rows * m.cols);
  for (std::size_t i = 0; i < m.values.size(); ++i)
    m.values[i] = std::bit_cast<double>(get_u64(bytes, kMatrixHeaderBytes + 8 * i));
  return m;
}

void write_matrix(const std::filesystem::path& path, std::uint64_t rows, std::uint64_t cols,
                  std::span<const double> values) {
  write_bytes(path, encode_matrix(rows, cols, values));
}

void write_matrix(const std::filesystem::path& path, const Grid2D& g) { write_matrix(path, g.nt(), g.nx(), g.flat()); }

MatrixData read_matrix_data(const std::filesystem::path& path) {
  const auto bytes = read_bytes(path);
  try {
    return decode_matrix(bytes);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what(), e.offset());
  }
}

Grid2D read_matrix(const std::filesystem::path& path) {
  MatrixData m = read_matrix_data(path);
  return Grid2D(m.rows, m.cols, std::move(m.values));
}

void write_ensemble(const std::filesystem::path& path, const Ensemble& e) {
  write_matrix(path, e.n(), e.dim(), e.data());
  write_text_file(shape_sidecar(path), std::to_string(e.shape().nt) + " " + std::to_string(e.shape().nx) + "\n");
}

Ensemble read_ensemble(const std::filesystem::path& path) {
  MatrixData m = read_matrix_data(path);
  std::istringstream side(read_text_file(shape_sidecar(path)));
  std::size_t nt = 0, nx = 0;
  if (!(side >> nt >> nx) || nt * nx != m.cols)
    throw FormatError(shape_sidecar(path).string() + ": shape does not match the ensemble columns", 0);
  return Ensemble(m.rows, {nt, nx}, std::move(m.values));
}

void write_pgm(const std::filesystem::path& path, const Grid2D& g) {
  const auto [mn, mx] = std::minmax_element(g.flat().begin(), g.flat().end());
  const double lo = *mn, span = *mx - *mn;
  std::string header = "P5\n" + std::to_string(g.nx()) + " " + std::to_string(g.nt()) + "\n255\n";
  std::vector<unsigned char> bytes(header.begin(), header.end());
  for (double v : g.flat()) {
    const double u = span > 0.0 ? (v - lo) / span : 0.0;
    bytes.push_back(static_cast<unsigned char>(std::lround(std::clamp(u, 0.0, 1.0) * 255.0)));
  }
  write_bytes(path, bytes);
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  write_bytes(path, std::span(reinterpret_cast<const unsigned char*>(text.data()), text.size()));
}

std::string read_text_file(const std::filesystem::path& path) {
  const auto bytes = read_bytes(path);
  return std::string(bytes.begin(), bytes.end());
}

}  // namespace pnpsvgd
