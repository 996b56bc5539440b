#include "fdas/fop_prep.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>

#include "fdas/parallel.hpp"
#include "fdas/signal_io.hpp"

namespace fdas {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

template <typename T>
std::vector<T> discard_rows(const ChunkedPlane<T>& raw, std::size_t& out_length) {
  if (raw.chunk == 0 || raw.overlap >= raw.chunk) {
    throw StructuralError("chunk metadata invalid: overlap " + std::to_string(raw.overlap) + " vs chunk " +
                          std::to_string(raw.chunk));
  }
  if (raw.values.size() != raw.rows * raw.chunk_count * raw.chunk) {
    throw StructuralError("chunked plane carries " + std::to_string(raw.values.size()) + " values, metadata implies " +
                          std::to_string(raw.rows * raw.chunk_count * raw.chunk));
  }
  const std::size_t available = raw.chunk_count * raw.advance();
  if (raw.valid_length > available) {
    throw StructuralError("valid length " + std::to_string(raw.valid_length) + " exceeds the " +
                          std::to_string(available) + " points the chunks can supply");
  }
  out_length = raw.valid_length == 0 ? available : raw.valid_length;

  std::vector<T> out(raw.rows * out_length);
  for (std::size_t r = 0; r < raw.rows; ++r) {
    const auto src = raw.row(r);
    T* dst = out.data() + r * out_length;
    std::size_t written = 0;
    for (std::size_t c = 0; c < raw.chunk_count && written < out_length; ++c) {
      const std::size_t take = std::min(raw.advance(), out_length - written);
      std::copy_n(src.begin() + static_cast<std::ptrdiff_t>(c * raw.chunk + raw.overlap), take, dst + written);
      written += take;
    }
  }
  return out;
}

}  // namespace

RFop::RFop(std::size_t rows, std::size_t cols, std::size_t block_cols, std::size_t n_hp)
    : rows_(rows), cols_(cols), block_cols_(block_cols), n_hp_(n_hp) {
  if (rows == 0 || cols == 0) throw std::invalid_argument("reorder needs a non-empty plane");
  if (block_cols == 0) throw std::invalid_argument("block_cols must be >= 1");
  if (n_hp == 0) throw std::invalid_argument("n_hp must be >= 1");

  block_count_ = ceil_div(cols, block_cols);
  segments_.resize(block_count_ * n_hp);
  used_.resize(block_count_);
  std::size_t longest = 0;
  for (std::size_t b = 0; b < block_count_; ++b) {
    const std::size_t j0 = b * block_cols;
    const std::size_t j1 = std::min(cols, j0 + block_cols);
    std::size_t offset = 0;
    for (std::size_t k = 1; k <= n_hp; ++k) {
      Segment& s = segments_[b * n_hp + (k - 1)];
      s.offset = offset;
      s.first_source_col = j0 / k;
      s.source_cols = (j1 - 1) / k - s.first_source_col + 1;
      offset += rows * s.source_cols;
    }
    used_[b] = offset;
    longest = std::max(longest, offset);
  }
  block_length_ = next_power_of_two(longest);
  values_.assign(block_count_ * block_length_, 0.0f);
}

std::size_t RFop::offset(std::size_t k, std::ptrdiff_t i, std::size_t j) const {
  if (k < 1 || k > n_hp_) throw std::out_of_range("harmonic index out of range");
  if (j >= cols_) throw std::out_of_range("channel out of range");
  const std::size_t slot = storage_row(i, rows_);
  if (i < -half_span(rows_) || slot >= rows_) throw std::out_of_range("template index out of range");
  const std::size_t b = j / block_cols_;
  const Segment& s = segment(b, k);
  return b * block_length_ + s.offset + slot * s.source_cols + (j / k - s.first_source_col);
}

Fop discard(const RawPower& raw) {
  std::size_t len = 0;
  auto values = discard_rows(raw, len);
  return Fop(raw.rows, len, std::move(values));
}

std::vector<cfloat> discard(const RawComplex& raw) {
  std::size_t len = 0;
  return discard_rows(raw, len);
}

Fop transpose(const Fop& fop) {
  Fop out(fop.cols(), fop.rows());
  constexpr std::size_t tile = 32;
  for (std::size_t r0 = 0; r0 < fop.rows(); r0 += tile) {
    for (std::size_t c0 = 0; c0 < fop.cols(); c0 += tile) {
      const std::size_t r1 = std::min(fop.rows(), r0 + tile);
      const std::size_t c1 = std::min(fop.cols(), c0 + tile);
      for (std::size_t r = r0; r < r1; ++r) {
        for (std::size_t c = c0; c < c1; ++c) out.at(c, r) = fop.at(r, c);
      }
    }
  }
  return out;
}

RFop reorder(const Fop& fop, std::size_t block_cols, std::size_t n_hp, PlaneLayout layout, std::size_t threads) {
  const bool channel_major = layout == PlaneLayout::channel_major;
  const std::size_t rows = channel_major ? fop.cols() : fop.rows();
  const std::size_t cols = channel_major ? fop.rows() : fop.cols();
  RFop r(rows, cols, block_cols, n_hp);
  auto source = [&](std::size_t row, std::size_t col) { return channel_major ? fop.at(col, row) : fop.at(row, col); };

  detail::parallel_for(r.block_count(), threads, [&](std::size_t b) {
    auto block = r.block(b);
    for (std::size_t k = 1; k <= n_hp; ++k) {
      const auto& seg = r.segment(b, k);
      for (std::size_t slot = 0; slot < rows; ++slot) {
        const std::ptrdiff_t i = template_index(slot, rows);
        const std::size_t src_row = storage_row(i / static_cast<std::ptrdiff_t>(k), rows);
        float* dst = block.data() + seg.offset + slot * seg.source_cols;
        for (std::size_t s = 0; s < seg.source_cols; ++s) dst[s] = source(src_row, seg.first_source_col + s);
      }
    }
  });
  return r;
}

void write_rfop(std::ostream& out, const RFop& rfop) {
  out.write("RFP1", 4);
  detail::put_u32(out, static_cast<std::uint32_t>(rfop.block_cols()));
  detail::put_u32(out, static_cast<std::uint32_t>(rfop.n_hp()));
  detail::put_u32(out, static_cast<std::uint32_t>(rfop.block_length()));
  detail::put_u32(out, static_cast<std::uint32_t>(rfop.block_count()));
  for (float v : rfop.values()) detail::put_f32(out, v);
}

RFop read_rfop(std::istream& in, std::size_t rows, std::size_t cols) {
  detail::expect_magic(in, "RFP1");
  const std::uint32_t block_cols = detail::get_u32(in, "block_cols");
  const std::uint32_t n_hp = detail::get_u32(in, "n_hp");
  const std::uint32_t block_length = detail::get_u32(in, "block_length");
  const std::uint32_t block_count = detail::get_u32(in, "block_count");
  RFop r(rows, cols, block_cols, n_hp);
  if (r.block_length() != block_length || r.block_count() != block_count) {
    throw StructuralError("rFOP header (" + std::to_string(block_count) + " blocks of " +
                          std::to_string(block_length) + ") does not match a " + std::to_string(rows) + "x" +
                          std::to_string(cols) + " plane");
  }
  for (auto& v : r.values()) v = detail::get_f32(in, "rFOP value");
  if (in.peek() != std::char_traits<char>::eof()) throw StructuralError("rFOP file carries trailing data");
  return r;
}

void save_rfop(const RFop& rfop, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  write_rfop(out, rfop);
}

RFop load_rfop(const std::filesystem::path& path, std::size_t rows, std::size_t cols) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return read_rfop(in, rows, cols);
}

PrepFlags required_transforms(const ConvStrategy& from, const HarmonicStrategy& to) {
  const bool chunked = std::holds_alternative<OlsFd>(from);
  PrepFlags f;
  f.discard = chunked;
  if (std::holds_alternative<SingleHp>(to)) return f;
  if (std::holds_alternative<NaiveMultipleHp>(to)) {
    f.transpose = chunked;
    return f;
  }
  f.transpose = true;
  f.reorder = std::holds_alternative<MultipleHpR>(to);
  return f;
}

PreparedPlane prepare(ConvPlane input, const ConvStrategy& from, const HarmonicStrategy& to, std::size_t n_hp,
                      PrepSite site, std::size_t threads) {
  const PrepFlags flags = required_transforms(from, to);
  if (flags.discard != std::holds_alternative<RawPower>(input)) {
    throw std::invalid_argument("plane kind does not match the " + to_string(from) + " -> " + to_string(to) +
                                " combination");
  }

  PreparedPlane out;
  out.timing.flags = flags;
  out.timing.site = site;

  Fop fop;
  if (flags.discard) {
    const auto t0 = Clock::now();
    fop = discard(std::get<RawPower>(input));
    out.timing.t_discard = seconds_since(t0);
  } else {
    fop = std::move(std::get<Fop>(input));
  }
  if (flags.transpose) {
    const auto t0 = Clock::now();
    fop = transpose(fop);
    out.layout = PlaneLayout::channel_major;
    out.timing.t_transpose = seconds_since(t0);
  }
  if (flags.reorder) {
    const auto& r = std::get<MultipleHpR>(to);
    const auto t0 = Clock::now();
    out.plane = reorder(fop, r.cols_per_group, n_hp, out.layout, threads);
    out.layout = PlaneLayout::template_major;
    out.timing.t_reorder = seconds_since(t0);
  } else {
    out.plane = std::move(fop);
  }
  return out;
}

}  // namespace fdas
