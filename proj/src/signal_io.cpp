#include "fdas/signal_io.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

namespace fdas {
namespace detail {

void put_u32(std::ostream& out, std::uint32_t v) {
  const std::array<char, 4> b = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
                                 static_cast<char>((v >> 16) & 0xff), static_cast<char>((v >> 24) & 0xff)};
  out.write(b.data(), 4);
}

void put_f32(std::ostream& out, float v) { put_u32(out, std::bit_cast<std::uint32_t>(v)); }

std::uint32_t get_u32(std::istream& in, const char* what) {
  std::array<unsigned char, 4> b{};
  if (!in.read(reinterpret_cast<char*>(b.data()), 4)) {
    throw StructuralError(std::string("truncated file while reading ") + what);
  }
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

float get_f32(std::istream& in, const char* what) { return std::bit_cast<float>(get_u32(in, what)); }

void expect_magic(std::istream& in, const char (&magic)[5]) {
  char got[4] = {};
  if (!in.read(got, 4) || std::memcmp(got, magic, 4) != 0) {
    throw StructuralError(std::string("bad magic, expected ") + magic);
  }
}

}  // namespace detail

using namespace detail;

void write_fop(std::ostream& out, const Fop& fop) {
  out.write("FOP1", 4);
  put_u32(out, static_cast<std::uint32_t>(fop.rows()));
  put_u32(out, static_cast<std::uint32_t>(fop.cols()));
  for (float v : fop.values()) put_f32(out, v);
}

Fop read_fop(std::istream& in) {
  expect_magic(in, "FOP1");
  const std::uint32_t rows = get_u32(in, "rows");
  const std::uint32_t cols = get_u32(in, "cols");
  const std::size_t n = static_cast<std::size_t>(rows) * cols;
  std::vector<float> values;
  values.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::array<unsigned char, 4> b{};
    if (!in.read(reinterpret_cast<char*>(b.data()), 4)) {
      throw StructuralError("FOP header says " + std::to_string(rows) + "x" + std::to_string(cols) +
                            " but file carries " + std::to_string(i) + " values");
    }
    values.push_back(std::bit_cast<float>(static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
                                          (static_cast<std::uint32_t>(b[2]) << 16) |
                                          (static_cast<std::uint32_t>(b[3]) << 24)));
  }
  if (in.peek() != std::char_traits<char>::eof()) {
    throw StructuralError("FOP header says " + std::to_string(rows) + "x" + std::to_string(cols) +
                          " but file carries trailing data");
  }
  return Fop(rows, cols, std::move(values));
}

void save_fop(const Fop& fop, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  write_fop(out, fop);
}

Fop load_fop(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return read_fop(in);
}

void save_series(const ComplexSeries& series, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out.write("CPX1", 4);
  put_u32(out, static_cast<std::uint32_t>(series.size()));
  for (const cfloat& v : series.data) {
    put_f32(out, v.real());
    put_f32(out, v.imag());
  }
}

ComplexSeries load_series(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  expect_magic(in, "CPX1");
  const std::uint32_t n = get_u32(in, "length");
  ComplexSeries s(n);
  for (std::uint32_t i = 0; i < n; ++i) {
    const float re = get_f32(in, "sample");
    const float im = get_f32(in, "sample");
    s[i] = {re, im};
  }
  return s;
}

}  // namespace fdas
