#include "fdas/convolution.hpp"

#include <algorithm>
#include <chrono>
#include <stdexcept>

#include "fdas/dft.hpp"
#include "fdas/parallel.hpp"

namespace fdas {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// out[i] += sum_j x[i - delay - j] * taps[j], accumulated in double per output point.
void add_partial(std::span<const cfloat> x, std::span<const cfloat> taps, std::size_t delay, std::span<cfloat> out) {
  const std::size_t n = x.size();
  for (std::size_t i = delay; i < n; ++i) {
    const std::size_t jmax = std::min(taps.size() - 1, i - delay);
    double re = 0.0;
    double im = 0.0;
    const cfloat* xp = x.data() + (i - delay);
    for (std::size_t j = 0; j <= jmax; ++j) {
      const double xr = xp[-static_cast<std::ptrdiff_t>(j)].real();
      const double xi = xp[-static_cast<std::ptrdiff_t>(j)].imag();
      const double hr = taps[j].real();
      const double hi = taps[j].imag();
      re += xr * hr - xi * hi;
      im += xr * hi + xi * hr;
    }
    out[i] += cfloat(static_cast<float>(re), static_cast<float>(im));
  }
}

void multiply_into(std::span<const cfloat> a, std::span<const cfloat> b, std::span<cfloat> out) {
  for (std::size_t i = 0; i < out.size(); ++i) {
    const cfloat x = a[i];
    const cfloat y = b[i];
    out[i] = cfloat(x.real() * y.real() - x.imag() * y.imag(), x.real() * y.imag() + x.imag() * y.real());
  }
}

std::vector<cfloat> padded_spectrum(std::span<const cfloat> h, const DftPlan& forward) {
  std::vector<cfloat> buf(forward.size(), cfloat{});
  std::copy(h.begin(), h.end(), buf.begin());
  forward.transform(buf);
  return buf;
}

// Chunk c of the overlap-save split: input points [c*advance - overlap, ... + chunk),
// reading zero outside [0, n).
void chunk_spectrum(std::span<const cfloat> x, const OlsGeometry& geo, std::size_t c, const DftPlan& forward,
                    std::span<cfloat> out) {
  const std::ptrdiff_t start =
      static_cast<std::ptrdiff_t>(c * geo.advance) - static_cast<std::ptrdiff_t>(geo.overlap);
  const auto n = static_cast<std::ptrdiff_t>(x.size());
  for (std::size_t p = 0; p < out.size(); ++p) {
    const std::ptrdiff_t idx = start + static_cast<std::ptrdiff_t>(p);
    out[p] = (idx >= 0 && idx < n) ? x[static_cast<std::size_t>(idx)] : cfloat{};
  }
  forward.transform(out);
}

void require_nonempty(std::span<const cfloat> x, std::span<const cfloat> h) {
  if (x.empty()) throw std::invalid_argument("FIR input is empty");
  if (h.empty()) throw std::invalid_argument("FIR coefficient array is empty");
}

}  // namespace

std::string to_string(const ConvStrategy& s) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, NaiveTd>) return "naive-td";
        if constexpr (std::is_same_v<T, OlaTd>) return "ola-td-" + std::to_string(v.n_paral);
        if constexpr (std::is_same_v<T, NaiveFd>) return "naive-fd";
        if constexpr (std::is_same_v<T, OlsFd>) {
          return std::string(v.engines == 2 ? "tols-" : "aols-") + std::to_string(v.chunk);
        }
      },
      s);
}

ConvStrategy parse_conv_strategy(const std::string& name, std::size_t param) {
  if (name == "naive-td") return NaiveTd{};
  if (name == "ola-td") return OlaTd{param == 0 ? 128 : param};
  if (name == "naive-fd") return NaiveFd{};
  if (name == "ols-fd") return OlsFd{param == 0 ? 2048 : param, 1};
  if (name == "tols-fd") return OlsFd{param == 0 ? 1024 : param, 2};
  throw std::invalid_argument("unknown convolution strategy '" + name + "'");
}

void validate(const ConvStrategy& s, std::size_t max_taps) {
  if (const auto* ola = std::get_if<OlaTd>(&s)) {
    if (ola->n_paral < 1 || !is_power_of_two(ola->n_paral)) {
      throw std::invalid_argument("OLA n_paral must be a power of two");
    }
  }
  if (const auto* ols = std::get_if<OlsFd>(&s)) {
    if (ols->chunk < 2 || !is_power_of_two(ols->chunk)) {
      throw std::invalid_argument("OLS chunk must be a power of two >= 2");
    }
    if (max_taps > 0 && ols->chunk <= max_taps - 1) {
      throw std::invalid_argument("OLS chunk " + std::to_string(ols->chunk) + " must exceed n_tap-1 = " +
                                  std::to_string(max_taps - 1));
    }
    if (ols->engines != 1 && ols->engines != 2) throw std::invalid_argument("OLS engines must be 1 or 2");
  }
}

bool is_frequency_domain(const ConvStrategy& s) {
  return std::holds_alternative<NaiveFd>(s) || std::holds_alternative<OlsFd>(s);
}

OlsGeometry ols_geometry(std::size_t input_length, std::size_t taps, std::size_t chunk) {
  if (taps == 0) throw std::invalid_argument("OLS needs at least one tap");
  OlsGeometry g;
  g.overlap = taps - 1;
  if (chunk <= g.overlap) {
    throw std::invalid_argument("OLS chunk " + std::to_string(chunk) + " too small for " + std::to_string(taps) +
                                " taps");
  }
  g.advance = chunk - g.overlap;
  g.chunk_count = std::max<std::size_t>(1, ceil_div(input_length, g.advance));
  return g;
}

ComplexSeries fir_naive_td(std::span<const cfloat> x, std::span<const cfloat> h) {
  require_nonempty(x, h);
  ComplexSeries y(x.size());
  add_partial(x, h, 0, y.data);
  return y;
}

OlaResult fir_ola_td(std::span<const cfloat> x, std::span<const cfloat> h, std::size_t n_paral) {
  require_nonempty(x, h);
  if (n_paral < 1) throw std::invalid_argument("OLA n_paral must be >= 1");
  OlaResult r;
  r.launch_count = ceil_div(h.size(), n_paral);
  r.padded_length = r.launch_count * n_paral;
  r.y = ComplexSeries(x.size());
  for (std::size_t s = 0; s < r.launch_count; ++s) {
    const std::size_t begin = s * n_paral;
    const std::size_t len = std::min(n_paral, h.size() - begin);
    add_partial(x, h.subspan(begin, len), begin, r.y.data);
  }
  return r;
}

ComplexSeries fir_naive_fd(std::span<const cfloat> x, std::span<const cfloat> h, std::size_t max_transform) {
  require_nonempty(x, h);
  const std::size_t size = std::max<std::size_t>(2, next_power_of_two(x.size() + h.size() - 1));
  if (size > max_transform) {
    throw std::length_error("naive FDFIR needs a " + std::to_string(size) + "-point transform, limit is " +
                            std::to_string(max_transform));
  }
  const DftPlan forward(size, Direction::forward);
  const DftPlan inverse(size, Direction::inverse);
  auto xs = padded_spectrum(x, forward);
  const auto hs = padded_spectrum(h, forward);
  multiply_into(xs, hs, xs);
  inverse.transform(xs);
  return ComplexSeries(std::vector<cfloat>(xs.begin(), xs.begin() + static_cast<std::ptrdiff_t>(x.size())));
}

OlsResult fir_ols_fd(std::span<const cfloat> x, std::span<const cfloat> h, std::size_t chunk) {
  require_nonempty(x, h);
  validate(OlsFd{chunk, 1}, h.size());
  const OlsGeometry geo = ols_geometry(x.size(), h.size(), chunk);
  const DftPlan forward(chunk, Direction::forward);
  const DftPlan inverse(chunk, Direction::inverse);
  const auto hs = padded_spectrum(h, forward);

  OlsResult r;
  r.raw.rows = 1;
  r.raw.chunk = chunk;
  r.raw.overlap = geo.overlap;
  r.raw.chunk_count = geo.chunk_count;
  r.raw.valid_length = x.size();
  r.raw.values.resize(geo.chunk_count * chunk);
  std::vector<cfloat> buf(chunk);
  for (std::size_t c = 0; c < geo.chunk_count; ++c) {
    chunk_spectrum(x, geo, c, forward, buf);
    std::span<cfloat> out(r.raw.values.data() + c * chunk, chunk);
    multiply_into(buf, hs, out);
    inverse.transform(out);
  }

  r.y = ComplexSeries(x.size());
  for (std::size_t c = 0; c < geo.chunk_count; ++c) {
    for (std::size_t p = geo.overlap; p < chunk; ++p) {
      const std::size_t dst = c * geo.advance + (p - geo.overlap);
      if (dst >= x.size()) break;
      r.y[dst] = r.raw.values[c * chunk + p];
    }
  }
  return r;
}

std::vector<float> power_spectrum(std::span<const cfloat> y) {
  std::vector<float> out(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) out[i] = power(y[i]);
  return out;
}

BankOutput convolve_bank(std::span<const cfloat> x, const FilterBank& bank, const ConvStrategy& strategy,
                         const ConvOptions& options) {
  if (bank.empty()) throw std::invalid_argument("filter bank is empty");
  if (x.empty()) throw std::invalid_argument("FIR input is empty");
  for (const auto& t : bank.templates) {
    if (t.empty()) throw std::invalid_argument("filter bank contains an empty template");
  }
  const std::size_t max_len = bank.max_length();
  validate(strategy, max_len);

  const std::size_t n = x.size();
  const std::size_t rows = bank.size();
  const std::size_t per_launch = std::max<std::size_t>(1, options.filters_per_launch);
  const std::size_t groups = ceil_div(rows, per_launch);
  const std::size_t threads = std::max<std::size_t>(1, options.threads);

  BankOutput result;
  ConvTiming& timing = result.timing;

  auto for_group = [&](std::size_t g, auto&& fn) {
    const std::size_t first = g * per_launch;
    const std::size_t count = std::min(per_launch, rows - first);
    detail::parallel_for(count, threads, [&](std::size_t k) { fn(first + k); });
    return count;
  };

  if (std::holds_alternative<NaiveTd>(strategy)) {
    Fop fop(rows, n);
    for (std::size_t g = 0; g < groups; ++g) {
      const auto t0 = Clock::now();
      for_group(g, [&](std::size_t r) {
        const auto y = fir_naive_td(x, bank.templates[r]);
        auto dst = fop.row(r);
        for (std::size_t i = 0; i < n; ++i) dst[i] = power(y[i]);
      });
      timing.launch_seconds.push_back(seconds_since(t0));
    }
    result.plane = std::move(fop);
    return result;
  }

  if (const auto* ola = std::get_if<OlaTd>(&strategy)) {
    const std::size_t p = ola->n_paral;
    const std::size_t sub_launches = ceil_div(max_len, p);
    Fop fop(rows, n);
    std::vector<std::vector<cfloat>> acc(rows);
    for (std::size_t g = 0; g < groups; ++g) {
      for (std::size_t s = 0; s < sub_launches; ++s) {
        const auto t0 = Clock::now();
        for_group(g, [&](std::size_t r) {
          const auto& h = bank.templates[r];
          auto& a = acc[r];
          if (s == 0) a.assign(n, cfloat{});
          const std::size_t begin = s * p;
          if (begin < h.size()) {
            add_partial(x, std::span<const cfloat>(h).subspan(begin, std::min(p, h.size() - begin)), begin, a);
          }
          if (s + 1 == sub_launches) {
            auto dst = fop.row(r);
            for (std::size_t i = 0; i < n; ++i) dst[i] = power(a[i]);
            std::vector<cfloat>().swap(a);
          }
        });
        timing.launch_seconds.push_back(seconds_since(t0));
      }
    }
    result.plane = std::move(fop);
    return result;
  }

  if (std::holds_alternative<NaiveFd>(strategy)) {
    const std::size_t size = std::max<std::size_t>(2, next_power_of_two(n + max_len - 1));
    if (size > options.max_transform) {
      throw std::length_error("naive FDFIR needs a " + std::to_string(size) + "-point transform, limit is " +
                              std::to_string(options.max_transform));
    }
    const DftPlan forward(size, Direction::forward);
    const DftPlan inverse(size, Direction::inverse);
    Fop fop(rows, n);
    auto t_input = Clock::now();
    const auto xs = padded_spectrum(x, forward);
    timing.input_transforms = 1;
    double input_seconds = seconds_since(t_input);
    for (std::size_t g = 0; g < groups; ++g) {
      const auto t0 = Clock::now();
      const std::size_t count = for_group(g, [&](std::size_t r) {
        const auto hs = padded_spectrum(bank.templates[r], forward);
        std::vector<cfloat> buf(size);
        multiply_into(xs, hs, buf);
        inverse.transform(buf);
        auto dst = fop.row(r);
        for (std::size_t i = 0; i < n; ++i) dst[i] = power(buf[i]);
      });
      timing.filter_transforms += count;
      timing.inverse_transforms += count;
      timing.launch_seconds.push_back(seconds_since(t0) + input_seconds);
      input_seconds = 0.0;
    }
    result.plane = std::move(fop);
    return result;
  }

  const auto& ols = std::get<OlsFd>(strategy);
  const std::size_t chunk = ols.chunk;
  const OlsGeometry geo = ols_geometry(n, max_len, chunk);
  const DftPlan forward(chunk, Direction::forward);
  const DftPlan inverse(chunk, Direction::inverse);

  RawPower raw;
  raw.rows = rows;
  raw.chunk = chunk;
  raw.overlap = geo.overlap;
  raw.chunk_count = geo.chunk_count;
  raw.valid_length = n;
  raw.values.resize(rows * raw.row_length());

  const bool reuse_input = ols.engines == 1;
  std::vector<cfloat> cached;
  double input_seconds = 0.0;
  if (reuse_input) {
    const auto t0 = Clock::now();
    cached.resize(geo.chunk_count * chunk);
    for (std::size_t c = 0; c < geo.chunk_count; ++c) {
      chunk_spectrum(x, geo, c, forward, std::span<cfloat>(cached.data() + c * chunk, chunk));
    }
    timing.input_transforms = geo.chunk_count;
    input_seconds = seconds_since(t0);
  }

  for (std::size_t g = 0; g < groups; ++g) {
    const auto t0 = Clock::now();
    const std::size_t count = for_group(g, [&](std::size_t r) {
      const auto hs = padded_spectrum(bank.templates[r], forward);
      std::vector<cfloat> spec(chunk);
      std::vector<cfloat> buf(chunk);
      auto dst = raw.row(r);
      for (std::size_t c = 0; c < geo.chunk_count; ++c) {
        std::span<const cfloat> in;
        if (reuse_input) {
          in = std::span<const cfloat>(cached.data() + c * chunk, chunk);
        } else {
          chunk_spectrum(x, geo, c, forward, spec);
          in = spec;
        }
        multiply_into(in, hs, buf);
        inverse.transform(buf);
        for (std::size_t p = 0; p < chunk; ++p) dst[c * chunk + p] = power(buf[p]);
      }
    });
    timing.filter_transforms += count;
    timing.inverse_transforms += count * geo.chunk_count;
    if (!reuse_input) timing.input_transforms += count * geo.chunk_count;
    timing.launch_seconds.push_back(seconds_since(t0) + input_seconds);
    input_seconds = 0.0;
  }
  result.plane = std::move(raw);
  return result;
}

}  // namespace fdas
