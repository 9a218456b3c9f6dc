#pragma once

// The prime-sum function family built on the kernel
//   k_p(x) = ln^2 p (1 - p cos(x ln p)) / (p^2 - 2p cos(x ln p) + 1)
//          = -(ln^2 p / p) * sum_{n>=1} cos(n x ln p) / p^{n-1}.
//
// g       = sum_p k_p(x)
// g_tilde = ln P sin(x ln P)/x + g
// f_prime = ln P sin(x ln P)/x - (1 - cos(x ln P))/x^2 + g
// f       = (1 - cos(x ln P))/x - sum_p ln p atan(sin(x ln p)/(p - cos(x ln p)))
// F       = Cin(x ln P) - sum_p sum_n (1 - cos(n x ln p))/(n^2 p^n)
//
// Prime sums are accumulated in ascending prime order with compensated
// summation. Grid evaluation loops primes outermost but keeps one
// accumulator per abscissa, so each grid value is bit-identical to the
// single-point result.

#include <rzstats/compensated.hpp>
#include <rzstats/error.hpp>
#include <rzstats/io.hpp>
#include <rzstats/parallel.hpp>
#include <rzstats/primes.hpp>
#include <rzstats/special.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace rzstats {

enum class FunctionKind { g, g_tilde, f_prime, f, F, cin };

constexpr std::string_view to_string(FunctionKind kind) noexcept {
  switch (kind) {
    case FunctionKind::g: return "g";
    case FunctionKind::g_tilde: return "g_tilde";
    case FunctionKind::f_prime: return "f_prime";
    case FunctionKind::f: return "f";
    case FunctionKind::F: return "F";
    case FunctionKind::cin: return "cin";
  }
  return "?";
}

/// Accepts both `g_tilde` and the CLI spelling `g-tilde`.
inline std::optional<FunctionKind> parse_function_kind(std::string_view s) {
  if (s == "g") return FunctionKind::g;
  if (s == "g_tilde" || s == "g-tilde") return FunctionKind::g_tilde;
  if (s == "f_prime" || s == "f-prime") return FunctionKind::f_prime;
  if (s == "f") return FunctionKind::f;
  if (s == "F") return FunctionKind::F;
  if (s == "cin") return FunctionKind::cin;
  return std::nullopt;
}

/// Below this |x ln P| the x-singular terms switch to their Taylor forms.
inline constexpr double kSingularThreshold = 1e-4;

/// Default truncation tolerance for eval_F.
inline constexpr double kDefaultFTolerance = 1e-12;

namespace detail {

inline double kernel_term(double p, double log2p, double c) noexcept {
  return log2p * (1.0 - p * c) / (p * p - 2.0 * p * c + 1.0);
}

inline double atan_term(double p, double logp, double theta) noexcept {
  // p - cos > 0, so atan2 agrees with atan of the quotient
  return logp * std::atan2(std::sin(theta), p - std::cos(theta));
}

// ln P sin(y)/x - (1 - cos y)/x^2 with y = x ln P.
inline double f_prime_singular(double x, double log_limit) noexcept {
  const double y = x * log_limit;
  const double l2 = log_limit * log_limit;
  if (std::fabs(y) < kSingularThreshold) return l2 * (0.5 - y * y / 8.0);
  const double half = std::sin(0.5 * y);
  return log_limit * std::sin(y) / x - 2.0 * half * half / (x * x);
}

inline double sinc_term(double x, double log_limit) noexcept {
  const double y = x * log_limit;
  if (std::fabs(y) < kSingularThreshold) {
    return log_limit * log_limit * (1.0 - y * y / 6.0);
  }
  return log_limit * std::sin(y) / x;
}

// (1 - cos y)/x, written as 2 sin^2(y/2)/x to avoid cancellation.
inline double f_singular(double x, double log_limit) noexcept {
  const double y = x * log_limit;
  if (std::fabs(y) < kSingularThreshold) return 0.5 * x * log_limit * log_limit * (1.0 - y * y / 12.0);
  const double half = std::sin(0.5 * y);
  return 2.0 * half * half / x;
}

inline double kernel_sum(const PrimeTable& pt, double x) {
  const auto primes = pt.primes();
  const auto logp = pt.log_p();
  const auto log2p = pt.log2_p();
  CompensatedSum acc;
  for (std::size_t i = 0; i < primes.size(); ++i) {
    acc += kernel_term(static_cast<double>(primes[i]), log2p[i], std::cos(x * logp[i]));
  }
  return acc.total();
}

inline double atan_sum(const PrimeTable& pt, double x) {
  const auto primes = pt.primes();
  const auto logp = pt.log_p();
  CompensatedSum acc;
  for (std::size_t i = 0; i < primes.size(); ++i) {
    acc += atan_term(static_cast<double>(primes[i]), logp[i], x * logp[i]);
  }
  return acc.total();
}

// Prime sums on a grid: one accumulator per abscissa, primes outermost.
template <typename Term>
std::vector<double> prime_sum_grid(const PrimeTable& pt, std::span<const double> xs,
                                   unsigned threads, Term&& term) {
  std::vector<double> out(xs.size());
  parallel_blocks(xs.size(), threads, [&](std::size_t begin, std::size_t end) {
    std::vector<CompensatedSum> acc(end - begin);
    const auto primes = pt.primes();
    const auto logp = pt.log_p();
    const auto log2p = pt.log2_p();
    for (std::size_t i = 0; i < primes.size(); ++i) {
      const double p = static_cast<double>(primes[i]);
      for (std::size_t k = begin; k < end; ++k) {
        acc[k - begin] += term(p, logp[i], log2p[i], xs[k]);
      }
    }
    for (std::size_t k = begin; k < end; ++k) out[k] = acc[k - begin].total();
  });
  return out;
}

// Smallest n such that 2/((n+1)^2 p^{n+1}) / (1 - 1/p) <= budget.
inline int tail_terms(double p, double budget) {
  double pn = p;  // p^{n+1} for n = 0
  for (int n = 0; n < 200; ++n) {
    const double bound = 2.0 / ((n + 1.0) * (n + 1.0) * pn) / (1.0 - 1.0 / p);
    if (bound <= budget) return n;
    pn *= p;
  }
  return 200;
}

}  // namespace detail

/// g_P(x) = sum_{p <= P} ln^2 p (1 - p cos(x ln p)) / (p^2 - 2p cos(x ln p) + 1).
inline double eval_g(const PrimeTable& pt, double x) { return detail::kernel_sum(pt, x); }

/// g_P plus the sinc term ln P sin(x ln P)/x.
inline double eval_g_tilde(const PrimeTable& pt, double x) {
  return detail::sinc_term(x, pt.log_limit()) + detail::kernel_sum(pt, x);
}

inline double eval_f_prime(const PrimeTable& pt, double x) {
  return detail::f_prime_singular(x, pt.log_limit()) + detail::kernel_sum(pt, x);
}

inline double eval_f(const PrimeTable& pt, double x) {
  return detail::f_singular(x, pt.log_limit()) - detail::atan_sum(pt, x);
}

/// F_P(x) = Cin(x ln P) - sum_p sum_n (1 - cos(n x ln p)) / (n^2 p^n).
///
/// The n-sum for each prime stops once its analytic tail bound drops below
/// tol * 2/p^2; summed over all primes the neglected tail is below tol.
inline double eval_F(const PrimeTable& pt, double x, double tol = kDefaultFTolerance) {
  if (!(tol > 0.0)) {
    throw Error(ErrorCode::domain_error, "eval_F tolerance must be positive");
  }
  if (!(x >= 0.0)) throw Error(ErrorCode::domain_error, "eval_F requires x >= 0");
  const auto primes = pt.primes();
  const auto logp = pt.log_p();
  CompensatedSum acc;
  for (std::size_t i = 0; i < primes.size(); ++i) {
    const double p = static_cast<double>(primes[i]);
    const int terms = std::max(1, detail::tail_terms(p, tol * 2.0 / (p * p)));
    double pn = 1.0;
    for (int n = 1; n <= terms; ++n) {
      pn *= p;
      const double half = std::sin(0.5 * n * x * logp[i]);
      acc += 2.0 * half * half / (static_cast<double>(n) * n * pn);
    }
  }
  return cin(x * pt.log_limit()) - acc.total();
}

/// atan(sin t / (p - cos t)), the closed form of sum_n sin(n t)/(n p^n).
inline double atan_kernel(std::uint64_t p, double t) {
  if (p < 2) throw Error(ErrorCode::domain_error, "atan_kernel requires p >= 2");
  return std::atan2(std::sin(t), static_cast<double>(p) - std::cos(t));
}

/// First n_terms of sum_n sin(n t)/(n p^n).
inline double atan_kernel_series(std::uint64_t p, double t, int n_terms) {
  if (p < 2) throw Error(ErrorCode::domain_error, "atan_kernel_series requires p >= 2");
  if (n_terms < 1) throw Error(ErrorCode::domain_error, "atan_kernel_series requires n_terms >= 1");
  const double inv = 1.0 / static_cast<double>(p);
  double scale = 1.0;
  CompensatedSum acc;
  for (int n = 1; n <= n_terms; ++n) {
    scale *= inv;
    acc += std::sin(n * t) * scale / n;
  }
  return acc.total();
}

/// Analytic bound on |atan_kernel - atan_kernel_series(n_terms)|.
inline double atan_kernel_series_bound(std::uint64_t p, int n_terms) {
  const double pd = static_cast<double>(p);
  return std::pow(pd, -(n_terms + 1.0)) / ((n_terms + 1.0) * (1.0 - 1.0 / pd));
}

/// ln^2 P / 2 - sum_{p <= P} ln^2 p / (p - 1); identical to eval_f_prime(pt, 0).
inline double const_C(const PrimeTable& pt) {
  return detail::f_prime_singular(0.0, pt.log_limit()) + detail::kernel_sum(pt, 0.0);
}

/// const_C without materialising the prime table, for cutoffs near 10^9.
inline double const_C_streaming(std::uint64_t limit,
                                 const std::function<void(std::uint64_t)>& progress = {}) {
  CompensatedSum acc;
  for_each_prime(
      limit,
      [&acc](std::uint64_t p) {
        const double pd = static_cast<double>(p);
        const double lp = std::log(pd);
        acc += detail::kernel_term(pd, lp * lp, 1.0);
      },
      progress);
  const double log_limit = std::log(static_cast<double>(limit));
  return detail::f_prime_singular(0.0, log_limit) + acc.total();
}

/// Evaluates one member of the family at every abscissa. Results do not
/// depend on `threads`.
inline std::vector<double> evaluate_grid(const PrimeTable& pt, FunctionKind kind,
                                         std::span<const double> xs, unsigned threads = 1,
                                         double F_tol = kDefaultFTolerance) {
  const double log_limit = pt.log_limit();
  switch (kind) {
    case FunctionKind::g:
    case FunctionKind::g_tilde:
    case FunctionKind::f_prime: {
      auto sum = detail::prime_sum_grid(
          pt, xs, threads, [](double p, double logp, double log2p, double x) {
            return detail::kernel_term(p, log2p, std::cos(x * logp));
          });
      for (std::size_t k = 0; k < xs.size(); ++k) {
        if (kind == FunctionKind::g_tilde) {
          sum[k] = detail::sinc_term(xs[k], log_limit) + sum[k];
        } else if (kind == FunctionKind::f_prime) {
          sum[k] = detail::f_prime_singular(xs[k], log_limit) + sum[k];
        }
      }
      return sum;
    }
    case FunctionKind::f: {
      auto sum = detail::prime_sum_grid(
          pt, xs, threads, [](double p, double logp, double, double x) {
            return detail::atan_term(p, logp, x * logp);
          });
      for (std::size_t k = 0; k < xs.size(); ++k) {
        sum[k] = detail::f_singular(xs[k], log_limit) - sum[k];
      }
      return sum;
    }
    case FunctionKind::F: {
      std::vector<double> out(xs.size());
      detail::parallel_blocks(xs.size(), threads, [&](std::size_t b, std::size_t e) {
        for (std::size_t k = b; k < e; ++k) out[k] = eval_F(pt, xs[k], F_tol);
      });
      return out;
    }
    case FunctionKind::cin: {
      std::vector<double> out(xs.size());
      std::transform(xs.begin(), xs.end(), out.begin(), [](double x) { return cin(x); });
      return out;
    }
  }
  return {};
}

/// A sampled member of the function family.
struct FunctionSample {
  std::vector<double> x_grid;
  std::vector<double> values;
  FunctionKind which = FunctionKind::g;
  std::uint64_t cutoff = 0;
};

/// Evenly spaced grid from..to inclusive (to within half a step).
inline std::vector<double> make_grid(double from, double to, double step) {
  if (!(step > 0.0) || !(to >= from) || !std::isfinite(from) || !std::isfinite(to)) {
    throw Error(ErrorCode::domain_error, "grid requires finite from <= to and step > 0");
  }
  const auto n = static_cast<std::size_t>(std::floor((to - from) / step + 0.5)) + 1;
  std::vector<double> xs(n);
  for (std::size_t k = 0; k < n; ++k) xs[k] = from + static_cast<double>(k) * step;
  return xs;
}

inline FunctionSample sample_function(const PrimeTable& pt, FunctionKind kind,
                                      std::vector<double> xs, unsigned threads = 1) {
  for (std::size_t k = 1; k < xs.size(); ++k) {
    if (!(xs[k] > xs[k - 1])) {
      throw Error(ErrorCode::domain_error, "sample grid must be strictly increasing");
    }
  }
  FunctionSample s;
  s.values = evaluate_grid(pt, kind, xs, threads);
  s.x_grid = std::move(xs);
  s.which = kind;
  s.cutoff = pt.limit();
  return s;
}

/// CSV `x,value`, 17 significant digits.
inline void write_sample_csv(std::ostream& os, const FunctionSample& s) {
  write_two_columns(os, "x,value", s.x_grid, s.values);
}

}  // namespace rzstats
