#pragma once

#include <rzstats/error.hpp>
#include <rzstats/io.hpp>
#include <rzstats/parallel.hpp>
#include <rzstats/zeros.hpp>

#include <cmath>
#include <cstdint>
#include <numeric>
#include <ostream>
#include <span>
#include <string>
#include <vector>

namespace rzstats {

inline constexpr double kDefaultBinWidth = 0.001;
inline constexpr double kDefaultXMax = 100.0;

/// Counts of pair differences gamma_j - gamma_i (i < j) in half-open bins
/// [k w, (k+1) w), restricted to differences below x_max.
struct Histogram {
  double bin_width = kDefaultBinWidth;
  double x_max = kDefaultXMax;
  std::vector<std::uint64_t> counts;
  std::uint64_t n_zeros = 0;
  std::uint64_t total_pairs = 0;

  std::size_t size() const noexcept { return counts.size(); }
  double bin_center(std::size_t k) const noexcept {
    return (static_cast<double>(k) + 0.5) * bin_width;
  }
  std::vector<double> bin_centers() const {
    std::vector<double> c(counts.size());
    for (std::size_t k = 0; k < c.size(); ++k) c[k] = bin_center(k);
    return c;
  }
  std::vector<double> counts_as_double() const {
    return {counts.begin(), counts.end()};
  }
  /// Scale turning counts into a pair density per unit x.
  double normalization() const noexcept {
    return total_pairs ? 1.0 / (static_cast<double>(total_pairs) * bin_width) : 0.0;
  }
  bool same_geometry(const Histogram& o) const noexcept {
    return bin_width == o.bin_width && x_max == o.x_max && counts.size() == o.counts.size();
  }
  friend bool operator==(const Histogram&, const Histogram&) = default;
};

/// ceil(x_max / w), tolerant of the representation error in e.g. 100/0.001.
inline std::size_t bin_count(double bin_width, double x_max) {
  if (!(bin_width > 0.0) || !std::isfinite(bin_width)) {
    throw Error(ErrorCode::domain_error, "bin width must be positive");
  }
  if (!(x_max > 0.0) || !std::isfinite(x_max)) {
    throw Error(ErrorCode::domain_error, "x_max must be positive");
  }
  const double ratio = x_max / bin_width;
  const double nearest = std::round(ratio);
  if (std::fabs(ratio - nearest) <= 1e-9 * nearest) return static_cast<std::size_t>(nearest);
  return static_cast<std::size_t>(std::ceil(ratio));
}

inline Histogram empty_histogram(double bin_width, double x_max) {
  Histogram h;
  h.bin_width = bin_width;
  h.x_max = x_max;
  h.counts.assign(bin_count(bin_width, x_max), 0);
  return h;
}

namespace detail {

inline void count_pair(Histogram& h, double delta) {
  auto k = static_cast<std::size_t>(std::floor(delta / h.bin_width));
  // delta < x_max can still round onto the one-past-the-end bin
  if (k >= h.counts.size()) k = h.counts.size() - 1;
  ++h.counts[k];
  ++h.total_pairs;
}

}  // namespace detail

/// Pairs whose left index lies in [begin, end); the right index ranges over
/// the whole table. n_zeros of the result is end - begin.
inline Histogram build_histogram_range(std::span<const double> ordinates, std::size_t begin,
                                       std::size_t end, double bin_width, double x_max) {
  Histogram h = empty_histogram(bin_width, x_max);
  end = std::min(end, ordinates.size());
  std::size_t j = begin;
  for (std::size_t i = begin; i < end; ++i) {
    if (j <= i) j = i + 1;
    while (j < ordinates.size() && ordinates[j] - ordinates[i] < x_max) ++j;
    for (std::size_t m = i + 1; m < j; ++m) detail::count_pair(h, ordinates[m] - ordinates[i]);
  }
  h.n_zeros = end > begin ? end - begin : 0;
  return h;
}

/// Elementwise sum; geometry must match.
inline Histogram merge(const Histogram& a, const Histogram& b) {
  if (!a.same_geometry(b)) {
    throw Error(ErrorCode::geometry_error, "cannot merge histograms with different bin geometry");
  }
  Histogram out = a;
  for (std::size_t k = 0; k < out.counts.size(); ++k) out.counts[k] += b.counts[k];
  out.n_zeros += b.n_zeros;
  out.total_pairs += b.total_pairs;
  return out;
}

/// Sliding-window histogram of all pair differences below x_max.
/// Parallel over blocks of the left index; counts are independent of
/// the thread count.
inline Histogram build_histogram(const ZeroTable& zt, double bin_width = kDefaultBinWidth,
                                 double x_max = kDefaultXMax, unsigned threads = 1) {
  const auto ord = zt.ordinates();
  threads = std::max(1u, threads);
  if (threads == 1 || ord.size() < 2 * threads) {
    return build_histogram_range(ord, 0, ord.size(), bin_width, x_max);
  }
  std::vector<Histogram> parts(threads);
  detail::parallel_blocks(threads, threads, [&](std::size_t b, std::size_t e) {
    for (std::size_t t = b; t < e; ++t) {
      const std::size_t lo = ord.size() * t / threads;
      const std::size_t hi = ord.size() * (t + 1) / threads;
      parts[t] = build_histogram_range(ord, lo, hi, bin_width, x_max);
    }
  });
  Histogram out = parts.front();
  for (std::size_t t = 1; t < parts.size(); ++t) out = merge(out, parts[t]);
  return out;
}

/// Adds the pairs whose right index lies in [h.n_zeros, n), turning the
/// histogram of the first h.n_zeros ordinates into that of the first n.
inline void extend_histogram(Histogram& h, const ZeroTable& zt, std::size_t n) {
  if (n > zt.count()) {
    throw Error(ErrorCode::range_error, "cannot extend histogram past the zero table");
  }
  if (n < h.n_zeros) throw Error(ErrorCode::range_error, "cannot shrink a histogram");
  const auto ord = zt.ordinates();
  for (std::size_t j = h.n_zeros; j < n; ++j) {
    for (std::size_t i = j; i-- > 0;) {
      const double d = ord[j] - ord[i];
      if (!(d < h.x_max)) break;
      detail::count_pair(h, d);
    }
  }
  h.n_zeros = n;
}

/// Sums groups of `factor` consecutive bins.
inline Histogram decimate(const Histogram& h, std::size_t factor) {
  if (factor < 1 || h.counts.size() % factor != 0) {
    throw Error(ErrorCode::domain_error, "decimation factor " + std::to_string(factor) +
                                             " does not divide " + std::to_string(h.counts.size()));
  }
  Histogram out;
  out.bin_width = h.bin_width * static_cast<double>(factor);
  out.x_max = h.x_max;
  out.n_zeros = h.n_zeros;
  out.total_pairs = h.total_pairs;
  out.counts.assign(h.counts.size() / factor, 0);
  for (std::size_t k = 0; k < h.counts.size(); ++k) out.counts[k / factor] += h.counts[k];
  return out;
}

/// CSV `bin_center,count`.
inline void write_histogram_csv(std::ostream& os, const Histogram& h) {
  os << "bin_center,count\n";
  for (std::size_t k = 0; k < h.counts.size(); ++k) {
    os << format_double(h.bin_center(k)) << ',' << h.counts[k] << '\n';
  }
}

}  // namespace rzstats
