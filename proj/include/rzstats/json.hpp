#pragma once

// JSON views of the result types, for the CLI and report files.

#include <rzstats/correction.hpp>
#include <rzstats/histogram.hpp>
#include <rzstats/spectrum.hpp>

#include <json.hpp>

#include <cstdint>
#include <cstring>
#include <span>
#include <string>

namespace rzstats {

inline constexpr std::string_view kToolVersion = "0.3.0";

/// FNV-1a over raw bytes, rendered as 16 hex digits.
inline std::string digest_bytes(const void* data, std::size_t size) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < size; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

template <typename T>
std::string digest(std::span<const T> values) {
  return digest_bytes(values.data(), values.size_bytes());
}

inline nlohmann::json to_json(const CorrectionFit& fit) {
  return {
      {"n_zeros", fit.n_zeros},
      {"cutoff", fit.cutoff},
      {"bin_width", fit.bin_width},
      {"x_max", fit.x_max},
      {"n_bins", fit.n_bins},
      {"amplitude", fit.amplitude},
      {"variant", std::string(to_string(fit.variant))},
      {"method", std::string(to_string(fit.method))},
      {"fit_freqs", fit.fit_freqs},
      {"flatness_band", {fit.flatness_lo, fit.flatness_hi}},
      {"flatness_before", fit.flatness_before},
      {"residual_flatness", fit.residual_flatness},
  };
}

inline nlohmann::json to_json(const PeakMeasurement& m) {
  return {
      {"bin", m.bin},
      {"freq", m.freq},
      {"offset", m.offset},
      {"re", m.value.real()},
      {"im", m.value.imag()},
      {"magnitude", m.magnitude},
      {"background", m.background},
      {"baseline_re", m.baseline.real()},
      {"baseline_im", m.baseline.imag()},
      {"excess", m.excess},
      {"noise_floor", m.noise_floor},
      {"local_max", m.local_max},
  };
}

inline nlohmann::json histogram_summary(const Histogram& h) {
  return {
      {"bin_width", h.bin_width},
      {"x_max", h.x_max},
      {"n_bins", h.size()},
      {"n_zeros", h.n_zeros},
      {"total_pairs", h.total_pairs},
      {"normalization", h.normalization()},
      {"counts_digest", digest(std::span<const std::uint64_t>(h.counts))},
  };
}

}  // namespace rzstats
