#pragma once

#include <rzstats/error.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace rzstats {

inline constexpr std::uint64_t kMaxSieveLimit = std::uint64_t{1} << 40;

namespace detail {

inline std::uint64_t isqrt(std::uint64_t n) {
  auto r = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(n)));
  while (r * r > n) --r;
  while ((r + 1) * (r + 1) <= n) ++r;
  return r;
}

// Plain sieve for the base primes below sqrt(limit); at most 2^20 here.
inline std::vector<std::uint32_t> small_primes(std::uint64_t bound) {
  std::vector<bool> composite(bound + 1, false);
  std::vector<std::uint32_t> out;
  for (std::uint64_t i = 2; i <= bound; ++i) {
    if (composite[i]) continue;
    out.push_back(static_cast<std::uint32_t>(i));
    for (std::uint64_t j = i * i; j <= bound; j += i) composite[j] = true;
  }
  return out;
}

inline void check_limit(std::uint64_t limit) {
  if (limit < 2) {
    throw Error(ErrorCode::domain_error,
                "prime cutoff must be >= 2, got " + std::to_string(limit));
  }
  if (limit > kMaxSieveLimit) {
    throw Error(ErrorCode::domain_error,
                "prime cutoff exceeds 2^40: " + std::to_string(limit));
  }
}

}  // namespace detail

/// Calls `emit(p)` for every prime p <= limit in ascending order.
///
/// Segmented, odd-only sieve of Eratosthenes; memory is O(sqrt(limit)) plus
/// one fixed-size segment. `progress(n)` (optional) is called after each
/// segment with the largest integer sieved so far.
template <typename Emit>
void for_each_prime(std::uint64_t limit, Emit&& emit,
                    const std::function<void(std::uint64_t)>& progress = {}) {
  detail::check_limit(limit);
  emit(std::uint64_t{2});
  if (limit < 3) return;

  const std::uint64_t root = detail::isqrt(limit);
  const auto base = detail::small_primes(root);

  constexpr std::uint64_t kSegmentOdds = std::uint64_t{1} << 18;
  std::vector<std::uint8_t> segment(kSegmentOdds);
  // next odd multiple to strike for each odd base prime
  std::vector<std::uint64_t> next;
  next.reserve(base.size());
  for (std::uint32_t q : base) {
    if (q != 2) next.push_back(std::uint64_t{q} * q);
  }

  for (std::uint64_t low = 3; low <= limit; low += 2 * kSegmentOdds) {
    const std::uint64_t high = std::min(limit, low + 2 * kSegmentOdds - 1);
    const std::uint64_t odds = (high - low) / 2 + 1;
    std::fill(segment.begin(), segment.begin() + static_cast<std::ptrdiff_t>(odds), 1);

    for (std::size_t k = 0, b = 1; b < base.size(); ++b, ++k) {
      const std::uint64_t q = base[b];
      std::uint64_t m = next[k];
      if (m > high) continue;
      for (; m <= high; m += 2 * q) segment[(m - low) / 2] = 0;
      next[k] = m;
    }
    for (std::uint64_t i = 0; i < odds; ++i) {
      if (segment[i]) emit(low + 2 * i);
    }
    if (progress) progress(high);
  }
}

/// All primes p <= limit with cached ln p and ln^2 p. Immutable once built.
class PrimeTable {
 public:
  explicit PrimeTable(std::uint64_t limit,
                      const std::function<void(std::uint64_t)>& progress = {})
      : limit_(limit) {
    detail::check_limit(limit);
    const double estimate =
        1.26 * static_cast<double>(limit) / std::log(static_cast<double>(limit) + 1.0) + 8.0;
    primes_.reserve(static_cast<std::size_t>(estimate));
    for_each_prime(limit, [this](std::uint64_t p) { primes_.push_back(p); }, progress);
    log_p_.resize(primes_.size());
    log2_p_.resize(primes_.size());
    for (std::size_t i = 0; i < primes_.size(); ++i) {
      log_p_[i] = std::log(static_cast<double>(primes_[i]));
      log2_p_[i] = log_p_[i] * log_p_[i];
    }
    log_limit_ = std::log(static_cast<double>(limit_));
  }

  std::uint64_t limit() const noexcept { return limit_; }
  std::size_t size() const noexcept { return primes_.size(); }
  std::uint64_t last() const noexcept { return primes_.back(); }

  std::span<const std::uint64_t> primes() const noexcept { return primes_; }
  std::span<const double> log_p() const noexcept { return log_p_; }
  std::span<const double> log2_p() const noexcept { return log2_p_; }

  /// ln P for the cutoff P (not the largest prime).
  double log_limit() const noexcept { return log_limit_; }

 private:
  std::uint64_t limit_;
  double log_limit_ = 0.0;
  std::vector<std::uint64_t> primes_;
  std::vector<double> log_p_;
  std::vector<double> log2_p_;
};

inline PrimeTable sieve_primes(std::uint64_t limit,
                               const std::function<void(std::uint64_t)>& progress = {}) {
  return PrimeTable(limit, progress);
}

}  // namespace rzstats
