#pragma once

// Amplitude fit and application of the prime-sum correction
//   corrected_k = counts_k + A * s(x_k),   x_k = (k + 1/2) dx,
// where s is g, g_tilde or f_prime sampled at bin centres. A is chosen so
// that the prime-logarithm lines of the histogram cancel.

#include <rzstats/error.hpp>
#include <rzstats/histogram.hpp>
#include <rzstats/kernel.hpp>
#include <rzstats/primes.hpp>
#include <rzstats/spectrum.hpp>
#include <rzstats/zeros.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string_view>
#include <vector>

namespace rzstats {

enum class FitMethod { spectral_lsq, spatial_lsq };

constexpr std::string_view to_string(FitMethod m) noexcept {
  return m == FitMethod::spectral_lsq ? "spectral_lsq" : "spatial_lsq";
}

inline std::optional<FitMethod> parse_fit_method(std::string_view s) {
  if (s == "spectral" || s == "spectral_lsq") return FitMethod::spectral_lsq;
  if (s == "spatial" || s == "spatial_lsq") return FitMethod::spatial_lsq;
  return std::nullopt;
}

inline constexpr std::uint64_t kFitPrimeBound = 20;
inline constexpr double kFitEdgeMargin = 0.5;
inline constexpr std::size_t kBaselineWindow = 2001;
inline constexpr std::size_t kMinFitBins = 10000;
inline constexpr std::size_t kFitWindowHalfWidth = 20;
inline constexpr int kFitPolyDegree = 2;

struct CorrectionFit {
  std::uint64_t n_zeros = 0;
  std::uint64_t cutoff = 0;
  double bin_width = 0.0;
  double x_max = 0.0;
  std::size_t n_bins = 0;
  double amplitude = 0.0;
  FunctionKind variant = FunctionKind::f_prime;
  FitMethod method = FitMethod::spectral_lsq;
  std::vector<double> fit_freqs;
  double flatness_before = 0.0;
  double residual_flatness = 0.0;
  double flatness_lo = 0.0;
  double flatness_hi = 0.0;
};

inline void check_variant(FunctionKind variant) {
  if (variant != FunctionKind::g && variant != FunctionKind::g_tilde &&
      variant != FunctionKind::f_prime) {
    throw Error(ErrorCode::domain_error, "correction variant must be g, g_tilde or f_prime");
  }
}

/// The chosen correction function at every bin centre.
inline std::vector<double> sample_correction(const PrimeTable& pt, const Histogram& hist,
                                             FunctionKind variant, unsigned threads = 1) {
  check_variant(variant);
  const auto centers = hist.bin_centers();
  return evaluate_grid(pt, variant, centers, threads);
}

/// {n ln p : p <= 20, n ln p <= min(ln P, Nyquist) - 0.5}, ascending.
inline std::vector<double> fit_frequencies(const PrimeTable& pt, double bin_width) {
  const double nyquist = std::numbers::pi / bin_width;
  const double top = std::min(pt.log_limit(), nyquist) - kFitEdgeMargin;
  std::vector<double> out;
  for (std::uint64_t p : pt.primes()) {
    if (p > kFitPrimeBound) break;
    const double lp = std::log(static_cast<double>(p));
    for (int n = 1; n * lp <= top; ++n) out.push_back(n * lp);
  }
  std::sort(out.begin(), out.end());
  return out;
}

/// Default band for residual flatness: [0.5, min(ln P, Nyquist) - 0.5].
inline std::pair<double, double> flatness_band(const PrimeTable& pt, double bin_width) {
  const double nyquist = std::numbers::pi / bin_width;
  return {kFitEdgeMargin, std::min(pt.log_limit(), nyquist * 0.999) - kFitEdgeMargin};
}

/// Centred moving average; the window is truncated at the ends.
inline std::vector<double> moving_average(std::span<const double> v, std::size_t window) {
  const std::size_t half = window / 2;
  std::vector<double> prefix(v.size() + 1, 0.0);
  CompensatedSum acc;
  for (std::size_t k = 0; k < v.size(); ++k) {
    acc += v[k];
    prefix[k + 1] = acc.total();
  }
  std::vector<double> out(v.size());
  for (std::size_t k = 0; k < v.size(); ++k) {
    const std::size_t lo = k > half ? k - half : 0;
    const std::size_t hi = std::min(v.size(), k + half + 1);
    out[k] = (prefix[hi] - prefix[lo]) / static_cast<double>(hi - lo);
  }
  return out;
}

inline std::vector<double> apply_correction(const Histogram& hist, double amplitude,
                                            std::span<const double> sample) {
  if (sample.size() != hist.size()) {
    throw Error(ErrorCode::geometry_error, "correction sample length does not match histogram");
  }
  std::vector<double> out(hist.size());
  for (std::size_t k = 0; k < out.size(); ++k) {
    out[k] = static_cast<double>(hist.counts[k]) + amplitude * sample[k];
  }
  return out;
}

/// counts + A * sample; the fit must describe this histogram's geometry.
inline std::vector<double> apply_correction(const Histogram& hist, const CorrectionFit& fit,
                                            std::span<const double> sample) {
  if (fit.bin_width != hist.bin_width || fit.n_bins != hist.size() || fit.x_max != hist.x_max) {
    throw Error(ErrorCode::geometry_error, "fit geometry does not match histogram");
  }
  return apply_correction(hist, fit.amplitude, sample);
}

namespace detail {

// Residual of sp over bins [j - K, j + K] (clipped to the open band
// (0, Nyquist)) after removing its least-squares fit by a quadratic in the
// bin offset. Smooth structure of the spectrum drops out; a spectral line
// centred near j survives.
inline std::vector<std::complex<double>> local_residual(const Spectrum& sp, std::size_t j) {
  const std::size_t lo = j > kFitWindowHalfWidth ? j - kFitWindowHalfWidth : 1;
  const std::size_t hi = std::min(sp.nyquist_index() - 1, j + kFitWindowHalfWidth);
  std::vector<std::complex<double>> r;
  for (std::size_t k = lo; k <= hi; ++k) r.push_back(sp.at(k));

  // orthonormal basis of polynomials up to kFitPolyDegree on the window
  std::vector<std::vector<double>> basis;
  for (int d = 0; d <= kFitPolyDegree; ++d) {
    std::vector<double> v(r.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
      const double t = (static_cast<double>(lo + i) - static_cast<double>(j)) /
                       static_cast<double>(kFitWindowHalfWidth);
      v[i] = std::pow(t, d);
    }
    for (const auto& u : basis) {
      double dot = 0.0;
      for (std::size_t i = 0; i < v.size(); ++i) dot += u[i] * v[i];
      for (std::size_t i = 0; i < v.size(); ++i) v[i] -= dot * u[i];
    }
    double norm = 0.0;
    for (double x : v) norm += x * x;
    norm = std::sqrt(norm);
    if (norm == 0.0) continue;
    for (double& x : v) x /= norm;
    basis.push_back(std::move(v));
  }
  for (const auto& u : basis) {
    std::complex<double> dot{0.0, 0.0};
    for (std::size_t i = 0; i < r.size(); ++i) dot += u[i] * r[i];
    for (std::size_t i = 0; i < r.size(); ++i) r[i] -= dot * u[i];
  }
  return r;
}

struct LinePairs {
  std::vector<std::complex<double>> h;
  std::vector<std::complex<double>> g;
};

inline LinePairs line_pairs(std::span<const double> series, std::span<const double> sample,
                            double bin_width, std::span<const double> freqs) {
  const Spectrum hs = dft(series, bin_width, false);
  const Spectrum gs = dft(sample, bin_width, false);
  if (hs.nyquist_index() < 3) {
    throw Error(ErrorCode::domain_error, "series too short for a spectral fit");
  }
  std::set<std::size_t> bins;
  for (double f : freqs) bins.insert(nearest_bin(hs, f));
  LinePairs out;
  for (std::size_t j : bins) {
    const auto rh = local_residual(hs, j);
    const auto rg = local_residual(gs, j);
    out.h.insert(out.h.end(), rh.begin(), rh.end());
    out.g.insert(out.g.end(), rg.begin(), rg.end());
  }
  return out;
}

inline double fit_spectral(std::span<const double> series, std::span<const double> sample,
                           double bin_width, std::span<const double> freqs) {
  const auto lines = line_pairs(series, sample, bin_width, freqs);
  double num = 0.0, den = 0.0, largest = 0.0;
  for (std::size_t i = 0; i < lines.h.size(); ++i) {
    num += (lines.h[i] * std::conj(lines.g[i])).real();
    den += std::norm(lines.g[i]);
    largest = std::max(largest, std::abs(lines.g[i]));
  }
  if (!(largest >= 1e-12)) {
    throw Error(ErrorCode::degenerate_fit, "correction has no content at the fit frequencies");
  }
  return -num / den;
}

inline double fit_spatial(std::span<const double> series, std::span<const double> sample) {
  const auto cb = moving_average(series, kBaselineWindow);
  const auto sb = moving_average(sample, kBaselineWindow);
  CompensatedSum num, den;
  for (std::size_t k = 0; k < series.size(); ++k) {
    const double r = series[k] - cb[k];
    const double v = sample[k] - sb[k];
    num += r * v;
    den += v * v;
  }
  if (!(den.total() > 1e-24)) {
    throw Error(ErrorCode::degenerate_fit, "correction sample is flat after baseline removal");
  }
  return -num.total() / den.total();
}

}  // namespace detail

/// Objective minimised by spectral_lsq: sum of |H + A G|^2 over a window of
/// +-20 bins around each fit line, after a local quadratic is projected out
/// of H and G in that window.
inline double spectral_objective(std::span<const double> series, std::span<const double> sample,
                                 double bin_width, std::span<const double> freqs,
                                 double amplitude) {
  const auto lines = detail::line_pairs(series, sample, bin_width, freqs);
  double total = 0.0;
  for (std::size_t i = 0; i < lines.h.size(); ++i) {
    total += std::norm(lines.h[i] + amplitude * lines.g[i]);
  }
  return total;
}

/// Amplitude for an arbitrary real series on the histogram grid (for
/// example an already-corrected one).
inline double fit_series(std::span<const double> series, double bin_width,
                         std::span<const double> sample, std::span<const double> freqs,
                         FitMethod method) {
  if (sample.size() != series.size()) {
    throw Error(ErrorCode::geometry_error, "correction sample length does not match series");
  }
  return method == FitMethod::spectral_lsq
             ? detail::fit_spectral(series, sample, bin_width, freqs)
             : detail::fit_spatial(series, sample);
}

/// Fits A from a precomputed correction sample (see sample_correction).
inline CorrectionFit fit_amplitude(const Histogram& hist, const PrimeTable& pt,
                                   FunctionKind variant, FitMethod method,
                                   std::span<const double> sample) {
  check_variant(variant);
  if (hist.size() < kMinFitBins || hist.total_pairs == 0) {
    throw Error(ErrorCode::domain_error,
                "fit needs a histogram with >= 10^4 bins and at least one pair");
  }
  if (sample.size() != hist.size()) {
    throw Error(ErrorCode::geometry_error, "correction sample length does not match histogram");
  }
  CorrectionFit fit;
  fit.n_zeros = hist.n_zeros;
  fit.cutoff = pt.limit();
  fit.bin_width = hist.bin_width;
  fit.x_max = hist.x_max;
  fit.n_bins = hist.size();
  fit.variant = variant;
  fit.method = method;
  fit.fit_freqs = fit_frequencies(pt, hist.bin_width);
  if (fit.fit_freqs.empty()) {
    throw Error(ErrorCode::degenerate_fit, "no fit frequencies below ln P - 0.5");
  }
  const auto before = hist.counts_as_double();
  fit.amplitude = fit_series(before, hist.bin_width, sample, fit.fit_freqs, method);

  std::tie(fit.flatness_lo, fit.flatness_hi) = flatness_band(pt, hist.bin_width);
  fit.flatness_before =
      flatness(dft(before, hist.bin_width, true), fit.flatness_lo, fit.flatness_hi);
  const auto after = apply_correction(hist, fit.amplitude, sample);
  fit.residual_flatness =
      flatness(dft(after, hist.bin_width, true), fit.flatness_lo, fit.flatness_hi);
  return fit;
}

inline CorrectionFit fit_amplitude(const Histogram& hist, const PrimeTable& pt,
                                   FunctionKind variant, FitMethod method,
                                   unsigned threads = 1) {
  const auto sample = sample_correction(pt, hist, variant, threads);
  return fit_amplitude(hist, pt, variant, method, sample);
}

/// One fit per requested zero count, built from a single growing histogram
/// and a single correction sample.
inline std::vector<CorrectionFit> amplitude_table(const ZeroTable& zt,
                                                  std::span<const std::size_t> n_values,
                                                  const PrimeTable& pt, double bin_width,
                                                  double x_max, FunctionKind variant,
                                                  FitMethod method, unsigned threads = 1) {
  for (std::size_t n : n_values) {
    if (n > zt.count()) {
      throw Error(ErrorCode::range_error, "requested " + std::to_string(n) +
                                              " zeros but table has " + std::to_string(zt.count()));
    }
  }
  std::set<std::size_t> ordered(n_values.begin(), n_values.end());
  Histogram hist = empty_histogram(bin_width, x_max);
  const auto sample = sample_correction(pt, hist, variant, threads);
  std::map<std::size_t, CorrectionFit> fits;
  for (std::size_t n : ordered) {
    extend_histogram(hist, zt, n);
    fits.emplace(n, fit_amplitude(hist, pt, variant, method, sample));
  }
  std::vector<CorrectionFit> out;
  out.reserve(n_values.size());
  for (std::size_t n : n_values) out.push_back(fits.at(n));
  return out;
}

}  // namespace rzstats
