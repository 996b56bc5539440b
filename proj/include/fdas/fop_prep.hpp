#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <variant>
#include <vector>

#include "fdas/convolution.hpp"
#include "fdas/harmonic_strategy.hpp"
#include "fdas/types.hpp"

namespace fdas {

enum class PlaneLayout { template_major, channel_major };

/// Reordered FOP. Block b holds every FOP point needed to form output
/// columns [b*block_cols, (b+1)*block_cols) of all harmonic planes, laid out
/// k-major, then destination template row, then source column, followed by
/// zero padding up to a common power-of-two block length.
class RFop {
 public:
  struct Segment {
    std::size_t offset = 0;            // within the block
    std::size_t first_source_col = 0;  // floor(first output column / k)
    std::size_t source_cols = 0;
    bool operator==(const Segment&) const = default;
  };

  /// Layout only (all values zero).
  RFop(std::size_t rows, std::size_t cols, std::size_t block_cols, std::size_t n_hp);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t block_cols() const { return block_cols_; }
  std::size_t n_hp() const { return n_hp_; }
  std::size_t block_length() const { return block_length_; }
  std::size_t block_count() const { return block_count_; }
  std::size_t size() const { return values_.size(); }
  std::size_t byte_size() const { return values_.size() * sizeof(float); }

  const Segment& segment(std::size_t block, std::size_t k) const { return segments_[block * n_hp_ + (k - 1)]; }
  /// Number of real (unpadded) points in a block.
  std::size_t used_length(std::size_t block) const { return used_[block]; }

  /// Absolute offset of SP_k(i, j) in values().
  std::size_t offset(std::size_t k, std::ptrdiff_t i, std::size_t j) const;
  float value(std::size_t k, std::ptrdiff_t i, std::size_t j) const { return values_[offset(k, i, j)]; }

  std::span<const float> block(std::size_t b) const { return {values_.data() + b * block_length_, block_length_}; }
  std::span<float> block(std::size_t b) { return {values_.data() + b * block_length_, block_length_}; }
  std::vector<float>& values() { return values_; }
  const std::vector<float>& values() const { return values_; }

  friend bool operator==(const RFop&, const RFop&) = default;

 private:
  std::size_t rows_, cols_, block_cols_, n_hp_;
  std::size_t block_count_ = 0;
  std::size_t block_length_ = 0;
  std::vector<Segment> segments_;
  std::vector<std::size_t> used_;
  std::vector<float> values_;
};

/// Drops the first `overlap` points of every chunk and truncates each row to
/// valid_length (or keeps everything when valid_length is 0).
Fop discard(const RawPower& raw);
std::vector<cfloat> discard(const RawComplex& raw);

Fop transpose(const Fop& fop);

/// `layout` states how `fop` is stored; the block contents are always taken
/// from the logical template-by-channel plane.
RFop reorder(const Fop& fop, std::size_t block_cols, std::size_t n_hp,
             PlaneLayout layout = PlaneLayout::template_major, std::size_t threads = 1);

// "RFP1", u32 block_cols, u32 n_hp, u32 block_length, u32 block_count, then
// blocks as little-endian binary32. The plane shape is not stored, so the
// loader takes it and checks that the header agrees with the derived layout.
void write_rfop(std::ostream& out, const RFop& rfop);
RFop read_rfop(std::istream& in, std::size_t rows, std::size_t cols);
void save_rfop(const RFop& rfop, const std::filesystem::path& path);
RFop load_rfop(const std::filesystem::path& path, std::size_t rows, std::size_t cols);

struct PrepFlags {
  bool discard = false;
  bool transpose = false;
  bool reorder = false;
  bool any() const { return discard || transpose || reorder; }
  friend bool operator==(const PrepFlags&, const PrepFlags&) = default;
};

/// Which transforms connect a convolution output to a harmonic-summing input.
PrepFlags required_transforms(const ConvStrategy& from, const HarmonicStrategy& to);

/// Where the preparation runs. Numerics are identical; only timing attribution differs.
enum class PrepSite { device, host };

struct PrepTiming {
  PrepFlags flags;
  PrepSite site = PrepSite::device;
  double t_discard = 0.0;
  double t_transpose = 0.0;
  double t_reorder = 0.0;
  double total() const {
    return (flags.discard ? t_discard : 0.0) + (flags.transpose ? t_transpose : 0.0) +
           (flags.reorder ? t_reorder : 0.0);
  }
};

using ConvPlane = std::variant<Fop, RawPower>;

struct PreparedPlane {
  std::variant<Fop, RFop> plane;
  PlaneLayout layout = PlaneLayout::template_major;
  PrepTiming timing;
};

/// Applies discard, transpose and reorder as required, in that order. With
/// nothing required the plane passes through untouched and all times are zero.
PreparedPlane prepare(ConvPlane input, const ConvStrategy& from, const HarmonicStrategy& to,
                      std::size_t n_hp, PrepSite site = PrepSite::device, std::size_t threads = 1);

}  // namespace fdas
