#pragma once

// Discrete Fourier transform with an angular-frequency axis: bin j sits at
// f_j = 2 pi j / (M dx), so a histogram component cos(f0 x) peaks at f0 and
// prime-logarithm oscillations appear at n ln p directly.

#include <rzstats/error.hpp>
#include <rzstats/io.hpp>
#include <rzstats/primes.hpp>

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <memory>
#include <mutex>
#include <numbers>
#include <ostream>
#include <span>
#include <vector>

namespace rzstats {

struct Spectrum {
  double freq_step = 0.0;  // 2 pi / (M dx)
  double delta_x = 0.0;
  std::vector<double> re;
  std::vector<double> im;
  bool normalized = false;
  std::complex<double> raw_dc;  // H(0) before normalisation

  std::size_t size() const noexcept { return re.size(); }
  double freq(std::size_t j) const noexcept { return static_cast<double>(j) * freq_step; }
  double nyquist() const noexcept { return std::numbers::pi / delta_x; }
  std::size_t nyquist_index() const noexcept { return re.size() / 2; }
  std::complex<double> at(std::size_t j) const { return {re[j], im[j]}; }
};

namespace detail {

inline std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwDeleter {
  void operator()(fftw_complex* p) const noexcept { fftw_free(p); }
};

}  // namespace detail

/// Optional window applied before transforming. Off unless asked for.
enum class Taper { none, hann };

/// H(f_j) = sum_k s_k exp(-i f_j k dx). With `normalize`, every component is
/// divided by H(0) and the DC bin is set to exactly 1.
inline Spectrum dft(std::span<const double> series, double delta_x, bool normalize,
                    Taper taper = Taper::none) {
  if (series.empty()) throw Error(ErrorCode::domain_error, "dft of an empty series");
  if (!(delta_x > 0.0)) throw Error(ErrorCode::domain_error, "dft requires delta_x > 0");
  const std::size_t m = series.size();
  std::unique_ptr<fftw_complex[], detail::FftwDeleter> in(
      static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * m)));
  std::unique_ptr<fftw_complex[], detail::FftwDeleter> out(
      static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * m)));
  fftw_plan plan;
  {
    std::lock_guard lock(detail::fftw_planner_mutex());
    plan = fftw_plan_dft_1d(static_cast<int>(m), in.get(), out.get(), FFTW_FORWARD, FFTW_ESTIMATE);
  }
  for (std::size_t k = 0; k < m; ++k) {
    double w = 1.0;
    if (taper == Taper::hann && m > 1) {
      w = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(k) /
                               static_cast<double>(m - 1));
    }
    in[k][0] = w * series[k];
    in[k][1] = 0.0;
  }
  fftw_execute(plan);
  {
    std::lock_guard lock(detail::fftw_planner_mutex());
    fftw_destroy_plan(plan);
  }

  Spectrum sp;
  sp.delta_x = delta_x;
  sp.freq_step = 2.0 * std::numbers::pi / (static_cast<double>(m) * delta_x);
  sp.re.resize(m);
  sp.im.resize(m);
  sp.raw_dc = {out[0][0], out[0][1]};
  if (normalize && sp.raw_dc == 0.0) {
    throw Error(ErrorCode::domain_error, "cannot normalise a spectrum whose DC component is zero");
  }
  for (std::size_t j = 0; j < m; ++j) {
    std::complex<double> h{out[j][0], out[j][1]};
    if (normalize) h /= sp.raw_dc;
    sp.re[j] = h.real();
    sp.im[j] = h.imag();
  }
  if (normalize) {
    sp.re[0] = 1.0;
    sp.im[0] = 0.0;
  }
  sp.normalized = normalize;
  return sp;
}

/// Same transform evaluated at an arbitrary angular frequency.
inline std::complex<double> dtft(std::span<const double> series, double delta_x, double freq) {
  std::complex<double> acc{0.0, 0.0};
  const std::complex<double> step = std::polar(1.0, -freq * delta_x);
  // re-anchor the rotating phasor periodically to bound drift
  constexpr std::size_t kAnchor = 256;
  std::complex<double> phase{1.0, 0.0};
  for (std::size_t k = 0; k < series.size(); ++k) {
    if (k % kAnchor == 0) phase = std::polar(1.0, -freq * delta_x * static_cast<double>(k));
    acc += series[k] * phase;
    phase *= step;
  }
  return acc;
}

/// A predicted prime-logarithm peak n ln p with relative amplitude
/// ln^2 p * p^{-n}, i.e. the ln^2 p / p envelope times p^{1-n}.
struct PeakPrediction {
  std::uint64_t p = 0;
  int n = 0;
  double freq = 0.0;
  double rel_amplitude = 0.0;
};

inline std::vector<PeakPrediction> predict_peaks(const PrimeTable& pt, double f_max) {
  if (!(f_max > std::numbers::ln2)) {
    throw Error(ErrorCode::domain_error, "f_max must exceed ln 2");
  }
  std::vector<PeakPrediction> out;
  const auto primes = pt.primes();
  const auto logp = pt.log_p();
  const auto log2p = pt.log2_p();
  for (std::size_t i = 0; i < primes.size() && logp[i] <= f_max; ++i) {
    const double p = static_cast<double>(primes[i]);
    double scale = 1.0 / p;
    for (int n = 1; n * logp[i] <= f_max; ++n) {
      out.push_back({primes[i], n, n * logp[i], log2p[i] * scale});
      scale /= p;
    }
  }
  std::sort(out.begin(), out.end(),
            [](const PeakPrediction& a, const PeakPrediction& b) { return a.freq < b.freq; });
  return out;
}

/// Measurement of one spectral line.
///
/// `magnitude` and `background` follow the plain definition: |H| at the bin
/// and the median |H| over the ring of +-20 bins minus the central 5.
/// Histogram spectra also carry a smooth, coherent component (short-range
/// pair repulsion) as large as the lines themselves, so the ring also yields
/// a complex `baseline` (median of Re and Im) and the line is judged by its
/// `excess` over that baseline against `noise_floor`, the median
/// |H_k - baseline| over the ring.
///
/// The excess is refined with the three-bin complex interpolation that is
/// exact for a tone under a rectangular window: the offset is
/// Re[(X_{j-1} - X_{j+1}) / (2 X_j - X_{j-1} - X_{j+1})] and the scalloping
/// loss sin(pi d)/(M sin(pi d/M)) is divided out.
struct PeakMeasurement {
  std::size_t bin = 0;
  double freq = 0.0;  // refined
  double offset = 0.0;  // refined position minus bin, in bins
  std::complex<double> value;
  double magnitude = 0.0;
  double background = 0.0;
  std::complex<double> baseline;
  double excess = 0.0;
  double noise_floor = 0.0;
  bool local_max = false;  // |H - baseline| at `bin` exceeds both neighbours

  double snr() const noexcept { return noise_floor > 0 ? excess / noise_floor : 0.0; }
};

inline constexpr std::size_t kRingHalfWidth = 20;
inline constexpr std::size_t kRingExclude = 2;  // central 5 bins

namespace detail {

inline double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
  std::nth_element(v.begin(), mid, v.end());
  if (v.size() % 2 == 1) return *mid;
  const double hi = *mid;
  const double lo = *std::max_element(v.begin(), mid);
  return 0.5 * (lo + hi);
}

inline std::vector<std::size_t> ring_bins(const Spectrum& sp, std::size_t j) {
  std::vector<std::size_t> ring;
  const std::size_t lo = j > kRingHalfWidth ? j - kRingHalfWidth : 1;
  const std::size_t hi = std::min(sp.nyquist_index(), j + kRingHalfWidth);
  for (std::size_t k = lo; k <= hi; ++k) {
    const std::size_t dist = k > j ? k - j : j - k;
    if (dist > kRingExclude) ring.push_back(k);
  }
  return ring;
}

// Tone offset (bins) and amplitude from three neighbouring coefficients.
inline std::pair<double, double> interpolate_tone(std::complex<double> left,
                                                  std::complex<double> centre,
                                                  std::complex<double> right, std::size_t m) {
  const auto denom = 2.0 * centre - left - right;
  double delta = 0.0;
  if (std::abs(denom) > 0.0) delta = ((left - right) / denom).real();
  if (!std::isfinite(delta)) delta = 0.0;
  delta = std::clamp(delta, -0.5, 0.5);
  double gain = 1.0;
  if (delta != 0.0) {
    const double md = static_cast<double>(m);
    gain = md * std::sin(std::numbers::pi * delta / md) / std::sin(std::numbers::pi * delta);
  }
  return {delta, std::abs(centre) * std::fabs(gain)};
}

}  // namespace detail

/// Measures the line at grid bin j.
inline PeakMeasurement measure_bin(const Spectrum& sp, std::size_t j) {
  if (j < 1 || j + 1 > sp.nyquist_index()) {
    throw Error(ErrorCode::range_error, "peak bin outside (0, Nyquist)");
  }
  PeakMeasurement m;
  m.bin = j;
  m.value = sp.at(j);
  m.magnitude = std::abs(m.value);

  const auto ring = detail::ring_bins(sp, j);
  std::vector<double> mags, res, ims;
  for (std::size_t k : ring) {
    mags.push_back(std::abs(sp.at(k)));
    res.push_back(sp.re[k]);
    ims.push_back(sp.im[k]);
  }
  m.background = detail::median(mags);
  m.baseline = {detail::median(res), detail::median(ims)};
  std::vector<double> dev;
  for (std::size_t k : ring) dev.push_back(std::abs(sp.at(k) - m.baseline));
  m.noise_floor = detail::median(dev);

  const auto left = sp.at(j - 1) - m.baseline;
  const auto centre = sp.at(j) - m.baseline;
  const auto right = sp.at(j + 1) - m.baseline;
  const auto [delta, amp] = detail::interpolate_tone(left, centre, right, sp.size());
  m.offset = delta;
  m.excess = amp;
  m.freq = (static_cast<double>(j) + delta) * sp.freq_step;
  m.local_max = std::abs(centre) > std::abs(left) && std::abs(centre) > std::abs(right);
  return m;
}

inline std::size_t nearest_bin(const Spectrum& sp, double freq) {
  if (!(freq > 0.0) || !(freq < sp.nyquist())) {
    throw Error(ErrorCode::range_error, "frequency outside (0, Nyquist)");
  }
  return static_cast<std::size_t>(std::llround(freq / sp.freq_step));
}

/// Line measurement at the grid frequency nearest `freq`.
inline PeakMeasurement peak_amplitude(const Spectrum& sp, double freq) {
  return measure_bin(sp, nearest_bin(sp, freq));
}

/// Strongest line (by excess over the local baseline) within `search` bins
/// of `freq`.
inline PeakMeasurement find_peak(const Spectrum& sp, double freq, std::size_t search = 2) {
  const std::size_t j0 = nearest_bin(sp, freq);
  PeakMeasurement best;
  bool have = false;
  for (std::size_t j = j0 > search ? j0 - search : 1; j <= j0 + search; ++j) {
    if (j < 1 || j + 1 > sp.nyquist_index()) continue;
    const auto m = measure_bin(sp, j);
    const double key = std::abs(sp.at(j) - m.baseline);
    if (!have || key > std::abs(best.value - best.baseline)) {
      best = m;
      have = true;
    }
  }
  if (!have) throw Error(ErrorCode::range_error, "no bins to search near frequency");
  return best;
}

/// Standard deviation of Re over [f_lo, f_hi] divided by the mean |Re|.
inline double flatness(const Spectrum& sp, double f_lo, double f_hi) {
  if (!(f_lo > 0.0) || !(f_hi > f_lo) || !(f_hi < sp.nyquist())) {
    throw Error(ErrorCode::domain_error, "flatness band must satisfy 0 < f_lo < f_hi < Nyquist");
  }
  std::vector<double> band;
  for (std::size_t j = 1; j <= sp.nyquist_index(); ++j) {
    const double f = sp.freq(j);
    if (f >= f_lo && f <= f_hi) band.push_back(sp.re[j]);
  }
  if (band.empty()) throw Error(ErrorCode::domain_error, "flatness band contains no bins");
  const auto [lo, hi] = std::minmax_element(band.begin(), band.end());
  if (*lo == *hi) return 0.0;
  double mean = 0.0, mean_abs = 0.0;
  for (double v : band) {
    mean += v;
    mean_abs += std::fabs(v);
  }
  mean /= static_cast<double>(band.size());
  mean_abs /= static_cast<double>(band.size());
  double var = 0.0;
  for (double v : band) var += (v - mean) * (v - mean);
  const double sd = std::sqrt(var / static_cast<double>(band.size()));
  if (sd == 0.0) return 0.0;
  return sd / mean_abs;
}

/// CSV `freq,re,im` from DC up to Nyquist.
inline void write_spectrum_csv(std::ostream& os, const Spectrum& sp) {
  os << "freq,re,im\n";
  for (std::size_t j = 0; j <= sp.nyquist_index() && j < sp.size(); ++j) {
    os << format_double(sp.freq(j)) << ',' << format_double(sp.re[j]) << ','
       << format_double(sp.im[j]) << '\n';
  }
}

}  // namespace rzstats
