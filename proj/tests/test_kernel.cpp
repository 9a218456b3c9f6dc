#include <rzstats/kernel.hpp>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <numbers>
#include <random>
#include <sstream>

using namespace rzstats;
using std::numbers::ln2;
using std::numbers::pi;

namespace {

const PrimeTable& table(std::uint64_t limit) {
  static std::map<std::uint64_t, PrimeTable> cache;
  auto it = cache.find(limit);
  if (it == cache.end()) it = cache.emplace(limit, sieve_primes(limit)).first;
  return it->second;
}

double f_integral(const PrimeTable& pt, double x) {
  if (x == 0.0) return 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
      [&](double t) { return eval_f(pt, t); }, 0.0, x, 15, 1e-13);
}

}  // namespace

TEST(EvalG, AtZeroIsMinusSumLogSquaredOverPMinusOne) {
  const auto& pt = table(1000);
  long double want = 0.0L;
  for (std::size_t i = 0; i < pt.size(); ++i) {
    const long double p = static_cast<long double>(pt.primes()[i]);
    const long double l = std::log(p);
    want -= l * l / (p - 1.0L);
  }
  EXPECT_NEAR(eval_g(pt, 0.0), static_cast<double>(want), 1e-13);
}

TEST(EvalG, QuarterTurnForPrimeTwo) {
  const auto& pt = table(2);
  EXPECT_NEAR(eval_g(pt, pi / (2 * ln2)), ln2 * ln2 / 5.0, 1e-15);
  EXPECT_NEAR(eval_g(pt, pi / (2 * ln2)), 0.096090602783640284933, 1e-15);
}

TEST(EvalG, MatchesExtendedPrecisionSum) {
  // mpmath, 40 digits, term by term over p <= 101
  EXPECT_NEAR(eval_g(table(101), 3.7), 1.350212701228986748562408, 1e-12);
}

TEST(EvalGTilde, LimitAtZero) {
  const auto& pt = table(101);
  const double l = std::log(101.0);
  EXPECT_NEAR(eval_g_tilde(pt, 0.0), l * l + eval_g(pt, 0.0), 1e-13);
}

TEST(EvalGTilde, HalfTurnForPrimeTwo) {
  EXPECT_NEAR(eval_g_tilde(table(2), pi / ln2), ln2 * ln2 / 3.0, 1e-15);
  EXPECT_NEAR(eval_g_tilde(table(2), pi / ln2), 0.16015100463940047489, 1e-15);
}

TEST(EvalGTilde, DiffersFromGBySincTerm) {
  const auto& pt = table(4090441);
  const double l = std::log(4090441.0);
  EXPECT_NEAR(eval_g_tilde(pt, 10.0) - eval_g(pt, 10.0), l * std::sin(10.0 * l) / 10.0, 1e-12);
}

TEST(EvalFPrime, LimitAtZeroForPrimeTwo) {
  EXPECT_NEAR(eval_f_prime(table(2), 0.0), -0.24022650695910071233, 1e-15);
}

TEST(EvalFPrime, MatchesFiniteDifferenceAndHighPrecision) {
  const auto& pt = table(101);
  const double h = 1e-5;
  const double fd = (eval_f(pt, 5.25 + h) - eval_f(pt, 5.25 - h)) / (2 * h);
  EXPECT_NEAR(eval_f_prime(pt, 5.25), fd, 1e-8);
  EXPECT_NEAR(eval_f_prime(pt, 5.25), -0.06377913201617739359375391, 1e-12);  // mpmath
}

TEST(EvalFPrime, SmoothAcrossTaylorSwitch) {
  const auto& pt = table(1000);
  const double edge = kSingularThreshold / pt.log_limit();
  const double below = eval_f_prime(pt, edge * (1 - 1e-9));
  const double above = eval_f_prime(pt, edge * (1 + 1e-9));
  EXPECT_NEAR(below, above, 1e-12);
  EXPECT_NEAR(eval_g_tilde(pt, edge * (1 - 1e-9)), eval_g_tilde(pt, edge * (1 + 1e-9)), 1e-12);
  // f itself moves by about 2e-9 * edge * f'(edge) across the pair
  const double step = eval_f(pt, edge * (1 + 1e-9)) - eval_f(pt, edge * (1 - 1e-9));
  EXPECT_NEAR(step, 2e-9 * edge * eval_f_prime(pt, edge), 1e-16);
}

TEST(EvalF, VanishesAtZero) {
  for (std::uint64_t P : {2ull, 101ull, 10007ull}) EXPECT_EQ(eval_f(table(P), 0.0), 0.0);
}

TEST(EvalF, ClosedFormForPrimeTwo) {
  const double x = pi / (2 * ln2);
  EXPECT_NEAR(eval_f(table(2), x), 1.0 / x - ln2 * std::atan(0.5), 1e-15);
  EXPECT_NEAR(eval_f(table(2), x), 0.11989516735303450573, 1e-15);
}

TEST(EvalF, MatchesExtendedPrecisionSum) {
  EXPECT_NEAR(eval_f(table(101), 5.25), 0.2690858931704484752913846, 1e-12);  // mpmath
}

TEST(EvalCapitalF, VanishesAtZero) { EXPECT_EQ(eval_F(table(101), 0.0, 1e-10), 0.0); }

TEST(EvalCapitalF, MatchesQuadratureOfF) {
  const auto& pt = table(101);
  const double tol = 1e-10;
  EXPECT_NEAR(eval_F(pt, 2.0, tol), f_integral(pt, 2.0), 1e-6 + tol);
}

TEST(EvalCapitalF, PrimeTwoTermByTerm) {
  // mpmath: Cin(ln 2) - sum_n (1 - cos(n ln 2)) / (n^2 2^n)
  EXPECT_NEAR(eval_F(table(2), 1.0, 1e-14), -0.08014258633159039087998845, 1e-13);
}

TEST(EvalCapitalF, RejectsBadArguments) {
  EXPECT_THROW(eval_F(table(101), 1.0, 0.0), Error);
  EXPECT_THROW(eval_F(table(101), 1.0, -1.0), Error);
  EXPECT_THROW(eval_F(table(101), -1.0, 1e-8), Error);
}

TEST(AtanKernel, QuarterTurn) {
  EXPECT_NEAR(atan_kernel(2, pi / 2), 0.46364760900080611621, 1e-15);
  const double s9 = atan_kernel_series(2, pi / 2, 9);
  EXPECT_NEAR(s9, 0.46368427579365079365, 1e-15);  // mpmath
  EXPECT_LE(std::fabs(s9 - atan_kernel(2, pi / 2)), atan_kernel_series_bound(2, 9));
}

TEST(AtanKernel, ZerosOfSine) {
  EXPECT_EQ(atan_kernel(5, 0.0), 0.0);
  EXPECT_EQ(atan_kernel_series(5, 0.0, 7), 0.0);
  EXPECT_NEAR(atan_kernel(3, 2 * pi), 0.0, 1e-15);
  EXPECT_NEAR(atan_kernel_series(3, 2 * pi, 12), 0.0, 1e-15);
}

TEST(AtanKernel, RejectsSmallP) {
  EXPECT_THROW(atan_kernel(1, 0.3), Error);
  EXPECT_THROW(atan_kernel_series(0, 0.3, 3), Error);
  EXPECT_THROW(atan_kernel_series(2, 0.3, 0), Error);
}

TEST(AtanKernel, SeriesWithinAnalyticBound) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> t_dist(-10.0, 10.0);
  for (std::uint64_t p : {2, 3, 5}) {
    for (int n = 1; n <= 12; ++n) {
      for (int k = 0; k < 100; ++k) {
        const double t = t_dist(rng);
        ASSERT_LE(std::fabs(atan_kernel(p, t) - atan_kernel_series(p, t, n)),
                  atan_kernel_series_bound(p, n) * (1 + 1e-12) + 1e-16)
            << p << ' ' << n << ' ' << t;
      }
    }
  }
}

TEST(ConstC, SmallCutoffs) {
  EXPECT_NEAR(const_C(table(2)), -ln2 * ln2 / 2, 1e-14);
  EXPECT_NEAR(const_C(table(3)), -ln2 * ln2, 1e-14);
  EXPECT_EQ(const_C_streaming(2), const_C(table(2)));
}

TEST(ConstC, EqualsFPrimeAtZero) {
  for (std::uint64_t P : {2ull, 3ull, 101ull, 100003ull}) {
    EXPECT_EQ(eval_f_prime(table(P), 0.0), const_C(table(P))) << P;
    EXPECT_EQ(const_C_streaming(P), const_C(table(P))) << P;
  }
}

TEST(ConstC, StabilisesWithCutoff) {
  std::vector<double> values;
  for (std::uint64_t P = 1000; P <= 10000000; P *= 10) values.push_back(const_C_streaming(P));
  for (std::size_t i = 2; i < values.size(); ++i) {
    EXPECT_LT(std::fabs(values[i] - values[i - 1]), std::fabs(values[i - 1] - values[i - 2]));
  }
}

TEST(Properties, DerivativeConsistency) {
  const auto& pt = table(100000);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> x_dist(0.1, 100.0);
  const double h = 1e-5;
  for (int i = 0; i < 200; ++i) {
    const double x = x_dist(rng);
    const double fd = (eval_f(pt, x + h) - eval_f(pt, x - h)) / (2 * h);
    ASSERT_NEAR(eval_f_prime(pt, x), fd, 1e-6) << x;
  }
}

TEST(Properties, AntiderivativeConsistency) {
  const auto& pt = table(10000);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> x_dist(0.0, 20.0);
  for (int i = 0; i < 50; ++i) {
    const double x = x_dist(rng);
    ASSERT_NEAR(eval_F(pt, x, 1e-10), f_integral(pt, x), 1e-6) << x;
  }
}

TEST(Properties, GeometricSeriesKernel) {
  // ln^2 p (1 - p cos t)/(p^2 - 2p cos t + 1) = -(ln^2 p / p) sum_n cos(n t)/p^{n-1}
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> x_dist(-50.0, 50.0);
  for (double p : {2.0, 3.0, 5.0, 7.0}) {
    const double l2 = std::log(p) * std::log(p);
    for (int i = 0; i < 100; ++i) {
      const double theta = x_dist(rng) * std::log(p);
      const double closed = l2 * (1 - p * std::cos(theta)) / (p * p - 2 * p * std::cos(theta) + 1);
      double series = 0.0;
      for (int n = 1; n <= 40; ++n) series += std::cos(n * theta) / std::pow(p, n - 1);
      ASSERT_NEAR(closed, -l2 / p * series, 1e-10);
    }
  }
}

TEST(Properties, Parity) {
  const auto& pt = table(10000);
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> x_dist(0.0, 60.0);
  for (int i = 0; i < 50; ++i) {
    const double x = x_dist(rng);
    EXPECT_NEAR(eval_g(pt, -x), eval_g(pt, x), 1e-14);
    EXPECT_NEAR(eval_g_tilde(pt, -x), eval_g_tilde(pt, x), 1e-14);
    EXPECT_NEAR(eval_f_prime(pt, -x), eval_f_prime(pt, x), 1e-14);
    EXPECT_NEAR(eval_f(pt, -x), -eval_f(pt, x), 1e-14);
  }
}

TEST(Grid, BitIdenticalToPointwiseForAnyThreadCount) {
  const auto& pt = table(20011);
  const auto xs = make_grid(0.0, 30.0, 0.173);
  for (auto kind : {FunctionKind::g, FunctionKind::g_tilde, FunctionKind::f_prime,
                    FunctionKind::f}) {
    const auto one = evaluate_grid(pt, kind, xs, 1);
    const auto four = evaluate_grid(pt, kind, xs, 4);
    ASSERT_EQ(one, four);
    for (std::size_t k = 0; k < xs.size(); k += 7) {
      double single = 0;
      switch (kind) {
        case FunctionKind::g: single = eval_g(pt, xs[k]); break;
        case FunctionKind::g_tilde: single = eval_g_tilde(pt, xs[k]); break;
        case FunctionKind::f_prime: single = eval_f_prime(pt, xs[k]); break;
        default: single = eval_f(pt, xs[k]); break;
      }
      ASSERT_EQ(one[k], single) << to_string(kind) << ' ' << xs[k];
    }
  }
}

TEST(Grid, SampleCsvHasFullPrecision) {
  const auto s = sample_function(table(101), FunctionKind::cin, make_grid(0.0, 1.0, 0.5));
  std::ostringstream os;
  write_sample_csv(os, s);
  std::istringstream in(os.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "x,value");
  std::getline(in, line);
  EXPECT_EQ(line, "0,0");
  std::getline(in, line);
  std::getline(in, line);
  const double v = std::stod(line.substr(line.find(',') + 1));
  EXPECT_EQ(v, cin(1.0));
}

TEST(Grid, RejectsNonIncreasingGrid) {
  EXPECT_THROW(sample_function(table(101), FunctionKind::g, {1.0, 1.0}), Error);
  EXPECT_THROW(make_grid(1.0, 0.0, 0.1), Error);
  EXPECT_THROW(make_grid(0.0, 1.0, 0.0), Error);
}
