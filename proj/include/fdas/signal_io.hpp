#pragma once

#include <filesystem>
#include <iosfwd>

#include "fdas/types.hpp"

namespace fdas {

// Binary layouts, all little-endian:
//   FOP file:    "FOP1" u32 rows, u32 cols, rows*cols binary32 (row-major)
//   series file: "CPX1" u32 length, length*(re, im) binary32

void write_fop(std::ostream& out, const Fop& fop);
Fop read_fop(std::istream& in);
void save_fop(const Fop& fop, const std::filesystem::path& path);
Fop load_fop(const std::filesystem::path& path);

void save_series(const ComplexSeries& series, const std::filesystem::path& path);
ComplexSeries load_series(const std::filesystem::path& path);

namespace detail {
void put_u32(std::ostream& out, std::uint32_t v);
void put_f32(std::ostream& out, float v);
std::uint32_t get_u32(std::istream& in, const char* what);
float get_f32(std::istream& in, const char* what);
void expect_magic(std::istream& in, const char (&magic)[5]);
}  // namespace detail

}  // namespace fdas
