#include "fdas/harmonic.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <chrono>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "fdas/parallel.hpp"

namespace fdas {

// ---------------------------------------------------------------------------
// strategy names

std::string to_string(const HarmonicStrategy& s) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, SingleHp>) return "single-" + std::to_string(v.n_paral);
        if constexpr (std::is_same_v<T, NaiveMultipleHp>) return "naive-multi";
        if constexpr (std::is_same_v<T, MultipleHpN>) return "multi-n-" + std::to_string(v.cols_per_group);
        if constexpr (std::is_same_v<T, MultipleHpR>) {
          return "multi-r-" + std::to_string(v.cols_per_group) + "x" + std::to_string(v.points_per_item);
        }
      },
      s);
}

HarmonicStrategy parse_harmonic_strategy(const std::string& name, std::size_t cols, std::size_t ppi) {
  if (name == "single") return SingleHp{cols == 0 ? 8 : cols};
  if (name == "naive-multi") return NaiveMultipleHp{};
  if (name == "multi-n") return MultipleHpN{cols == 0 ? 1 : cols};
  if (name == "multi-r") return MultipleHpR{cols == 0 ? 16 : cols, ppi == 0 ? 4 : ppi};
  throw std::invalid_argument("unknown harmonic-summing strategy '" + name + "'");
}

void validate(const HarmonicStrategy& s) {
  std::visit(
      [](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, SingleHp>) {
          if (v.n_paral < 1) throw std::invalid_argument("SingleHP n_paral must be >= 1");
        } else if constexpr (std::is_same_v<T, MultipleHpN>) {
          if (v.cols_per_group < 1) throw std::invalid_argument("MultipleHP-N cols_per_group must be >= 1");
        } else if constexpr (std::is_same_v<T, MultipleHpR>) {
          if (v.cols_per_group < 1 || v.points_per_item < 1) {
            throw std::invalid_argument("MultipleHP-R parameters must be >= 1");
          }
        }
      },
      s);
}

// ---------------------------------------------------------------------------
// thresholds and candidates

ThresholdTable::ThresholdTable(std::size_t n_hp, std::size_t rows, std::vector<double> values)
    : n_hp_(n_hp), rows_(rows), values_(std::move(values)) {
  if (values_.size() != n_hp_ * rows_) throw std::invalid_argument("threshold table dimension mismatch");
  for (double v : values_) {
    if (!std::isfinite(v) || v <= 0.0) throw std::invalid_argument("thresholds must be finite and > 0");
  }
}

ThresholdTable ThresholdTable::constant(const std::vector<double>& per_harmonic, std::size_t rows) {
  std::vector<double> v;
  v.reserve(per_harmonic.size() * rows);
  for (double t : per_harmonic) v.insert(v.end(), rows, t);
  return ThresholdTable(per_harmonic.size(), rows, std::move(v));
}

ThresholdTable ThresholdTable::scaled(double factor) const {
  auto v = values_;
  for (auto& x : v) x *= factor;
  return ThresholdTable(n_hp_, rows_, std::move(v));
}

namespace {

// Ordering within one harmonic plane: stronger first.
bool better(const Candidate& a, const Candidate& b) {
  if (a.power != b.power) return a.power > b.power;
  if (a.channel != b.channel) return a.channel < b.channel;
  return a.template_index < b.template_index;
}

}  // namespace

bool canonical_less(const Candidate& a, const Candidate& b) {
  if (a.harmonic != b.harmonic) return a.harmonic < b.harmonic;
  return better(a, b);
}

std::size_t CandidateList::count(std::uint32_t harmonic) const {
  return static_cast<std::size_t>(
      std::count_if(entries.begin(), entries.end(), [&](const Candidate& c) { return c.harmonic == harmonic; }));
}

CandidateAccumulator::CandidateAccumulator(const ThresholdTable& thresholds, std::size_t n_cand)
    : thresholds_(&thresholds), n_cand_(n_cand), heaps_(thresholds.n_hp()) {
  if (n_cand == 0) throw std::invalid_argument("n_cand must be >= 1");
}

namespace {

bool keep_top(std::vector<Candidate>& heap, std::size_t cap, const Candidate& c) {
  if (heap.size() < cap) {
    heap.push_back(c);
    std::push_heap(heap.begin(), heap.end(), better);
    return true;
  }
  if (!better(c, heap.front())) return false;
  std::pop_heap(heap.begin(), heap.end(), better);
  heap.back() = c;
  std::push_heap(heap.begin(), heap.end(), better);
  return true;
}

}  // namespace

bool CandidateAccumulator::offer(std::uint32_t k, std::int32_t i, std::uint32_t j, float power) {
  if (!(static_cast<double>(power) > thresholds_->at(k, i))) return false;
  return keep_top(heaps_[k - 1], n_cand_, Candidate{k, i, j, power});
}

void CandidateAccumulator::merge(const CandidateAccumulator& other) {
  for (std::size_t k = 0; k < heaps_.size() && k < other.heaps_.size(); ++k) {
    for (const auto& c : other.heaps_[k]) keep_top(heaps_[k], n_cand_, c);
  }
}

CandidateList CandidateAccumulator::finish() const {
  CandidateList out;
  for (const auto& h : heaps_) out.entries.insert(out.entries.end(), h.begin(), h.end());
  std::sort(out.entries.begin(), out.entries.end(), canonical_less);
  return out;
}

bool detect(float hp_value, std::uint32_t k, std::int32_t i, std::uint32_t j, CandidateAccumulator& accumulator) {
  return accumulator.offer(k, i, j, hp_value);
}

// ---------------------------------------------------------------------------
// stretch and the reference evaluation

float stretch_lookup(const Fop& fop, std::size_t k, std::ptrdiff_t i, std::size_t j) {
  if (k < 1) throw std::out_of_range("harmonic index must be >= 1");
  const std::ptrdiff_t half = half_span(fop.rows());
  if (i < -half || i > half) throw std::out_of_range("template index " + std::to_string(i) + " out of range");
  if (j >= fop.cols()) throw std::out_of_range("channel " + std::to_string(j) + " out of range");
  return fop.at_template(i / static_cast<std::ptrdiff_t>(k), j / k);
}

namespace {

void check_dimensions(std::size_t rows, const ThresholdTable& thresholds, const HarmonicParams& params) {
  if (rows == 0 || rows % 2 == 0) throw std::invalid_argument("harmonic summing needs an odd template count");
  if (params.n_hp < 1) throw std::invalid_argument("n_hp must be >= 1");
  if (params.n_cand < 1) throw std::invalid_argument("n_cand must be >= 1");
  if (thresholds.n_hp() != params.n_hp || thresholds.rows() != rows) {
    throw std::invalid_argument("threshold table is " + std::to_string(thresholds.n_hp()) + "x" +
                                std::to_string(thresholds.rows()) + ", plane needs " + std::to_string(params.n_hp) +
                                "x" + std::to_string(rows));
  }
}

}  // namespace

NaiveHarmonicResult harmonic_sum_naive(const Fop& fop, const ThresholdTable& thresholds,
                                       const HarmonicParams& params) {
  check_dimensions(fop.rows(), thresholds, params);
  const std::size_t rows = fop.rows();
  const std::size_t cols = fop.cols();
  const std::ptrdiff_t half = half_span(rows);

  NaiveHarmonicResult result;
  Fop previous(rows, cols);  // HP_0
  for (std::size_t k = 1; k <= params.n_hp; ++k) {
    Fop current(rows, cols);
    std::vector<Candidate> above;
    for (std::ptrdiff_t i = -half; i <= half; ++i) {
      for (std::size_t j = 0; j < cols; ++j) {
        const float hp = previous.at_template(i, j) + stretch_lookup(fop, k, i, j);
        current.at(storage_row(i, rows), j) = hp;
        if (static_cast<double>(hp) > thresholds.at(k, i)) {
          above.push_back({static_cast<std::uint32_t>(k), static_cast<std::int32_t>(i), static_cast<std::uint32_t>(j), hp});
        }
      }
    }
    std::sort(above.begin(), above.end(), canonical_less);
    if (above.size() > params.n_cand) above.resize(params.n_cand);
    result.candidates.entries.insert(result.candidates.entries.end(), above.begin(), above.end());
    result.planes.push_back(current);
    previous = std::move(current);
  }
  return result;
}

// ---------------------------------------------------------------------------
// optimised traversals

namespace {

using Clock = std::chrono::steady_clock;

constexpr std::size_t kColumnUnit = 256;

struct LogicalPlane {
  const Fop* fop;
  bool channel_major;
  std::size_t rows;
  std::size_t cols;

  float at(std::size_t row, std::size_t col) const {
    return channel_major ? fop->at(col, row) : fop->at(row, col);
  }
};

LogicalPlane logical(const Fop& fop, PlaneLayout layout) {
  const bool cm = layout == PlaneLayout::channel_major;
  return {&fop, cm, cm ? fop.cols() : fop.rows(), cm ? fop.rows() : fop.cols()};
}

struct UnitOutput {
  std::vector<CandidateAccumulator> acc;
  std::vector<HarmonicStats> stats;
};

UnitOutput make_units(std::size_t n, const ThresholdTable& thresholds, const HarmonicParams& params) {
  UnitOutput u;
  u.acc.reserve(n);
  for (std::size_t i = 0; i < n; ++i) u.acc.emplace_back(thresholds, params.n_cand);
  u.stats.resize(n);
  return u;
}

HarmonicResult gather(UnitOutput& units, const ThresholdTable& thresholds, const HarmonicParams& params) {
  CandidateAccumulator total(thresholds, params.n_cand);
  HarmonicResult r;
  for (std::size_t u = 0; u < units.acc.size(); ++u) {
    total.merge(units.acc[u]);
    r.stats.plane_reads += units.stats[u].plane_reads;
    r.stats.plane_writes += units.stats[u].plane_writes;
    r.stats.hp_reads += units.stats[u].hp_reads;
  }
  r.candidates = total.finish();
  return r;
}

HarmonicResult run_naive_multiple(const LogicalPlane& p, const ThresholdTable& th, const HarmonicParams& params) {
  const std::size_t n_units = ceil_div(p.cols, kColumnUnit);
  auto units = make_units(n_units, th, params);
  const std::ptrdiff_t half = half_span(p.rows);
  detail::parallel_for(n_units, params.threads, [&](std::size_t u) {
    auto& acc = units.acc[u];
    const std::size_t j1 = std::min(p.cols, (u + 1) * kColumnUnit);
    for (std::size_t j = u * kColumnUnit; j < j1; ++j) {
      for (std::ptrdiff_t i = -half; i <= half; ++i) {
        float hp = 0.0f;
        for (std::size_t k = 1; k <= params.n_hp; ++k) {
          hp += p.at(storage_row(i / static_cast<std::ptrdiff_t>(k), p.rows), j / k);
          detect(hp, static_cast<std::uint32_t>(k), static_cast<std::int32_t>(i), static_cast<std::uint32_t>(j), acc);
        }
      }
    }
    units.stats[u].plane_reads = (j1 - u * kColumnUnit) * p.rows * params.n_hp;
  });
  return gather(units, th, params);
}

HarmonicResult run_single(const LogicalPlane& p, const SingleHp& s, const ThresholdTable& th,
                          const HarmonicParams& params) {
  const std::size_t n_units = ceil_div(p.cols, kColumnUnit);
  auto units = make_units(n_units, th, params);
  const std::ptrdiff_t half = half_span(p.rows);
  std::vector<float> previous;
  std::vector<float> current(p.rows * p.cols);
  for (std::size_t k = 1; k <= params.n_hp; ++k) {
    detail::parallel_for(n_units, params.threads, [&](std::size_t u) {
      auto& acc = units.acc[u];
      const std::size_t j0 = u * kColumnUnit;
      const std::size_t j1 = std::min(p.cols, j0 + kColumnUnit);
      for (std::ptrdiff_t i = -half; i <= half; ++i) {
        const std::size_t slot = storage_row(i, p.rows);
        const std::size_t src = storage_row(i / static_cast<std::ptrdiff_t>(k), p.rows);
        for (std::size_t jv = j0; jv < j1; jv += s.n_paral) {
          const std::size_t lanes = std::min(s.n_paral, j1 - jv);
          for (std::size_t l = 0; l < lanes; ++l) {
            const std::size_t j = jv + l;
            const float base = k == 1 ? 0.0f : previous[slot * p.cols + j];
            const float hp = base + p.at(src, j / k);
            current[slot * p.cols + j] = hp;
            detect(hp, static_cast<std::uint32_t>(k), static_cast<std::int32_t>(i), static_cast<std::uint32_t>(j), acc);
          }
        }
      }
      const std::uint64_t points = (j1 - j0) * p.rows;
      units.stats[u].plane_reads += points;
      units.stats[u].plane_writes += points;
      if (k > 1) units.stats[u].hp_reads += points;
    });
    std::swap(previous, current);
    current.resize(p.rows * p.cols);
  }
  return gather(units, th, params);
}

HarmonicResult run_multiple_n(const LogicalPlane& p, const MultipleHpN& s, const ThresholdTable& th,
                              const HarmonicParams& params) {
  const std::size_t group = s.cols_per_group;
  const std::size_t n_groups = ceil_div(p.cols, group);
  const std::size_t n_units = ceil_div(n_groups, std::max<std::size_t>(1, kColumnUnit / group));
  const std::size_t groups_per_unit = ceil_div(n_groups, n_units);
  auto units = make_units(n_units, th, params);
  const std::ptrdiff_t half = half_span(p.rows);
  const std::size_t n_hp = params.n_hp;

  detail::parallel_for(n_units, params.threads, [&](std::size_t u) {
    auto& acc = units.acc[u];
    std::vector<std::uint64_t> keys;
    std::vector<std::vector<float>> local(n_hp + 1);
    std::vector<std::size_t> first_col(n_hp + 1), width(n_hp + 1);
    std::vector<std::ptrdiff_t> reach(n_hp + 1);
    const std::size_t g_end = std::min(n_groups, (u + 1) * groups_per_unit);
    for (std::size_t g = u * groups_per_unit; g < g_end; ++g) {
      const std::size_t j0 = g * group;
      const std::size_t j1 = std::min(p.cols, j0 + group);

      // every distinct FOP point the group needs, loaded once
      keys.clear();
      for (std::size_t k = 1; k <= n_hp; ++k) {
        const auto kk = static_cast<std::ptrdiff_t>(k);
        reach[k] = half / kk;
        first_col[k] = j0 / k;
        width[k] = (j1 - 1) / k - first_col[k] + 1;
        auto& buf = local[k];
        buf.resize(static_cast<std::size_t>(2 * reach[k] + 1) * width[k]);
        for (std::ptrdiff_t t = -reach[k]; t <= reach[k]; ++t) {
          const std::size_t src = storage_row(t, p.rows);
          for (std::size_t c = 0; c < width[k]; ++c) {
            keys.push_back((static_cast<std::uint64_t>(src) << 32) | (first_col[k] + c));
            buf[static_cast<std::size_t>(t + reach[k]) * width[k] + c] = p.at(src, first_col[k] + c);
          }
        }
      }
      std::sort(keys.begin(), keys.end());
      units.stats[u].plane_reads += static_cast<std::uint64_t>(std::unique(keys.begin(), keys.end()) - keys.begin());

      for (std::size_t j = j0; j < j1; ++j) {
        for (std::ptrdiff_t i = -half; i <= half; ++i) {
          float hp = 0.0f;
          for (std::size_t k = 1; k <= n_hp; ++k) {
            const std::ptrdiff_t t = i / static_cast<std::ptrdiff_t>(k);
            hp += local[k][static_cast<std::size_t>(t + reach[k]) * width[k] + (j / k - first_col[k])];
            detect(hp, static_cast<std::uint32_t>(k), static_cast<std::int32_t>(i), static_cast<std::uint32_t>(j), acc);
          }
        }
      }
    }
  });
  return gather(units, th, params);
}

HarmonicResult run_multiple_r(const RFop& r, const MultipleHpR& s, const ThresholdTable& th,
                              const HarmonicParams& params) {
  if (r.block_cols() != s.cols_per_group) {
    throw std::invalid_argument("rFOP was built for " + std::to_string(r.block_cols()) + " columns per block, strategy wants " +
                                std::to_string(s.cols_per_group));
  }
  if (r.n_hp() != params.n_hp) throw std::invalid_argument("rFOP harmonic count does not match n_hp");
  const std::size_t n_blocks = r.block_count();
  auto units = make_units(n_blocks, th, params);
  const std::ptrdiff_t half = half_span(r.rows());
  const std::size_t n_hp = params.n_hp;

  detail::parallel_for(n_blocks, params.threads, [&](std::size_t b) {
    auto& acc = units.acc[b];
    const auto block = r.block(b);
    units.stats[b].plane_reads += block.size();
    const std::size_t j0 = b * r.block_cols();
    const std::size_t j1 = std::min(r.cols(), j0 + r.block_cols());
    for (std::size_t jw = j0; jw < j1; jw += s.points_per_item) {
      const std::size_t jw1 = std::min(j1, jw + s.points_per_item);
      for (std::ptrdiff_t i = -half; i <= half; ++i) {
        const std::size_t slot = storage_row(i, r.rows());
        for (std::size_t j = jw; j < jw1; ++j) {
          float hp = 0.0f;
          for (std::size_t k = 1; k <= n_hp; ++k) {
            const auto& seg = r.segment(b, k);
            hp += block[seg.offset + slot * seg.source_cols + (j / k - seg.first_source_col)];
            detect(hp, static_cast<std::uint32_t>(k), static_cast<std::int32_t>(i), static_cast<std::uint32_t>(j), acc);
          }
        }
      }
    }
  });
  return gather(units, th, params);
}

}  // namespace

HarmonicResult harmonic_sum(const PreparedPlane& input, const HarmonicStrategy& strategy,
                            const ThresholdTable& thresholds, const HarmonicParams& params) {
  validate(strategy);
  const auto t0 = Clock::now();
  HarmonicResult result;
  if (const auto* r = std::get_if<MultipleHpR>(&strategy)) {
    const auto* rfop = std::get_if<RFop>(&input.plane);
    if (rfop == nullptr) throw std::invalid_argument("MultipleHP-R needs a reordered FOP input");
    check_dimensions(rfop->rows(), thresholds, params);
    result = run_multiple_r(*rfop, *r, thresholds, params);
  } else {
    const auto* fop = std::get_if<Fop>(&input.plane);
    if (fop == nullptr) throw std::invalid_argument(to_string(strategy) + " needs a FOP input, got a reordered FOP");
    const LogicalPlane p = logical(*fop, input.layout);
    check_dimensions(p.rows, thresholds, params);
    if (const auto* s = std::get_if<SingleHp>(&strategy)) {
      result = run_single(p, *s, thresholds, params);
    } else if (std::holds_alternative<NaiveMultipleHp>(strategy)) {
      result = run_naive_multiple(p, thresholds, params);
    } else {
      result = run_multiple_n(p, std::get<MultipleHpN>(strategy), thresholds, params);
    }
  }
  result.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
  return result;
}

HarmonicResult harmonic_sum(const Fop& fop, const HarmonicStrategy& strategy, const ThresholdTable& thresholds,
                            const HarmonicParams& params) {
  PreparedPlane p;
  p.plane = fop;
  p.layout = PlaneLayout::template_major;
  return harmonic_sum(p, strategy, thresholds, params);
}

// ---------------------------------------------------------------------------
// CSV

void write_candidates_csv(std::ostream& out, const CandidateList& list) {
  out << "harmonic,template,channel,power\n";
  char buf[64];
  for (const auto& c : list.entries) {
    const auto res = std::to_chars(buf, buf + sizeof(buf), c.power);
    out << c.harmonic << ',' << c.template_index << ',' << c.channel << ',' << std::string_view(buf, res.ptr - buf)
        << '\n';
  }
}

namespace {

template <typename T>
T parse_number(std::string_view field, std::size_t line, const char* name) {
  T v{};
  const auto res = std::from_chars(field.data(), field.data() + field.size(), v);
  if (res.ec != std::errc() || res.ptr != field.data() + field.size()) {
    throw ParseError("candidate CSV line " + std::to_string(line) + ": bad " + name + " '" + std::string(field) + "'");
  }
  return v;
}

}  // namespace

CandidateList read_candidates_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "harmonic,template,channel,power") {
    throw ParseError("candidate CSV: missing header");
  }
  CandidateList list;
  std::size_t n = 1;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty()) continue;
    std::vector<std::string_view> f;
    std::string_view rest(line);
    for (std::size_t pos; (pos = rest.find(',')) != std::string_view::npos; rest.remove_prefix(pos + 1)) {
      f.push_back(rest.substr(0, pos));
    }
    f.push_back(rest);
    if (f.size() != 4) throw ParseError("candidate CSV line " + std::to_string(n) + ": expected 4 fields");
    list.entries.push_back({parse_number<std::uint32_t>(f[0], n, "harmonic"), parse_number<std::int32_t>(f[1], n, "template"),
                            parse_number<std::uint32_t>(f[2], n, "channel"), parse_number<float>(f[3], n, "power")});
  }
  return list;
}

void save_candidates_csv(const CandidateList& list, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  write_candidates_csv(out, list);
}

CandidateList load_candidates_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return read_candidates_csv(in);
}

}  // namespace fdas
