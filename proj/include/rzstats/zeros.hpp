#pragma once

#include <rzstats/error.hpp>
#include <rzstats/io.hpp>

#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace rzstats {

inline constexpr double kFirstZero = 14.134725;
inline constexpr double kFirstZeroTolerance = 5e-6;

/// Ascending positive ordinates of nontrivial zeta zeros.
class ZeroTable {
 public:
  ZeroTable() = default;

  /// Validates; throws validation_error naming the offending index.
  ZeroTable(std::vector<double> ordinates, std::string source)
      : ordinates_(std::move(ordinates)), source_(std::move(source)) {
    validate(ordinates_);
  }

  std::span<const double> ordinates() const noexcept { return ordinates_; }
  std::size_t count() const noexcept { return ordinates_.size(); }
  const std::string& source() const noexcept { return source_; }

  friend bool operator==(const ZeroTable& a, const ZeroTable& b) {
    // bitwise, so -0.0/0.0 or NaN never compare equal by accident
    return a.ordinates_.size() == b.ordinates_.size() &&
           std::memcmp(a.ordinates_.data(), b.ordinates_.data(),
                       a.ordinates_.size() * sizeof(double)) == 0;
  }

  static void validate(std::span<const double> v) {
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!std::isfinite(v[i]) || !(v[i] > 0.0)) {
        throw Error(ErrorCode::validation_error,
                    "ordinate at index " + std::to_string(i) + " is not a positive finite value");
      }
      if (i > 0 && !(v[i] > v[i - 1])) {
        throw Error(ErrorCode::validation_error,
                    "ordinates not strictly increasing at index " + std::to_string(i));
      }
    }
    if (!v.empty() && !(std::fabs(v[0] - kFirstZero) < kFirstZeroTolerance)) {
      throw Error(ErrorCode::validation_error,
                  "first ordinate " + format_double(v[0]) + " is not the first zeta zero 14.134725");
    }
  }

 private:
  std::vector<double> ordinates_;
  std::string source_;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto ws = " \t\r\n\f\v";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

inline std::vector<char> read_all(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io_error, "cannot open " + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace detail

/// Parses one decimal ordinate per line; blank lines and lines starting with
/// '#' are skipped.
inline ZeroTable parse_text(std::string_view text, const std::string& source) {
  std::vector<double> values;
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto nl = text.find('\n');
    const auto raw = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    const auto line = detail::trim(raw);
    if (line.empty() || line.front() == '#') continue;
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(line.data(), line.data() + line.size(), v);
    if (ec != std::errc{} || ptr != line.data() + line.size()) {
      throw Error(ErrorCode::parse_error, source + ":" + std::to_string(line_no) +
                                              ": not a decimal number: '" + std::string(line) + "'");
    }
    values.push_back(v);
  }
  return ZeroTable(std::move(values), source);
}

inline ZeroTable load_text(const std::string& path) {
  const auto bytes = detail::read_all(path);
  return parse_text(std::string_view(bytes.data(), bytes.size()), path);
}

/// Little-endian IEEE-754 binary64, contiguous, no header.
inline ZeroTable load_binary(const std::string& path) {
  const auto bytes = detail::read_all(path);
  if (bytes.size() % 8 != 0) {
    throw Error(ErrorCode::format_error, path + ": size " + std::to_string(bytes.size()) +
                                             " is not a multiple of 8 bytes");
  }
  std::vector<double> values(bytes.size() / 8);
  for (std::size_t i = 0; i < values.size(); ++i) {
    std::uint64_t bits = 0;
    std::memcpy(&bits, bytes.data() + 8 * i, 8);
    if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
    values[i] = std::bit_cast<double>(bits);
  }
  return ZeroTable(std::move(values), path);
}

inline void write_text(const ZeroTable& zt, const std::string& path) {
  auto out = open_output(path);
  for (double v : zt.ordinates()) out << format_double(v) << '\n';
}

inline void write_binary(const ZeroTable& zt, const std::string& path) {
  auto out = open_output(path, true);
  for (double v : zt.ordinates()) {
    auto bits = std::bit_cast<std::uint64_t>(v);
    if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
    char buf[8];
    std::memcpy(buf, &bits, 8);
    out.write(buf, 8);
  }
}

/// Prefix of the first n ordinates.
inline ZeroTable take_first(const ZeroTable& zt, std::size_t n) {
  if (n > zt.count()) {
    throw Error(ErrorCode::range_error, "requested " + std::to_string(n) + " zeros but table has " +
                                            std::to_string(zt.count()));
  }
  const auto ord = zt.ordinates();
  return ZeroTable(std::vector<double>(ord.begin(), ord.begin() + static_cast<std::ptrdiff_t>(n)),
                   zt.source() + " [first " + std::to_string(n) + "]");
}

inline ZeroTable load_zeros(const std::string& path, std::string_view format) {
  if (format == "text") return load_text(path);
  if (format == "binary") return load_binary(path);
  throw Error(ErrorCode::domain_error, "unknown zero table format '" + std::string(format) + "'");
}

}  // namespace rzstats
