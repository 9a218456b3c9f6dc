#include <rzstats/zeros.hpp>

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>

using namespace rzstats;

namespace {

class TempDir : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = std::filesystem::temp_directory_path() /
           ("rzstats_zeros_" + std::to_string(::getpid()) + "_" +
            ::testing::UnitTest::GetInstance()->current_test_info()->name());
    std::filesystem::create_directories(dir_);
  }
  void TearDown() override { std::filesystem::remove_all(dir_); }

  std::string write(const std::string& name, const std::string& bytes) {
    const auto path = (dir_ / name).string();
    std::ofstream(path, std::ios::binary) << bytes;
    return path;
  }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  std::filesystem::path dir_;
};

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorCode::io_error;
}

}  // namespace

using ZeroIo = TempDir;

TEST_F(ZeroIo, LoadsFirstThreeZeros) {
  const auto zt = load_text(write("z.txt", "14.134725\n21.022040\n25.010858\n"));
  ASSERT_EQ(zt.count(), 3u);
  EXPECT_EQ(zt.ordinates()[0], 14.134725);
  EXPECT_EQ(zt.ordinates()[1], 21.022040);
  EXPECT_EQ(zt.ordinates()[2], 25.010858);
  // mpmath.zetazero(1..3) to the printed precision
  EXPECT_NEAR(zt.ordinates()[1], 21.022039638771555, 1e-6);
  EXPECT_NEAR(zt.ordinates()[2], 25.010857580145689, 1e-6);
}

TEST_F(ZeroIo, CommentsWhitespaceAndBlankLines) {
  const auto zt =
      load_text(write("z.txt", "# Platt table excerpt\n  14.134725141734693 \r\n\n\t21.022039638771555\n"));
  EXPECT_EQ(zt.count(), 2u);
}

TEST_F(ZeroIo, NonIncreasingReportsIndex) {
  const auto p = write("z.txt", "14.134725\n14.0\n");
  EXPECT_EQ(code_of([&] { load_text(p); }), ErrorCode::validation_error);
  try {
    load_text(write("y.txt", "21.0\n14.1\n"));
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("index 1"), std::string::npos) << e.what();
  }
}

TEST_F(ZeroIo, ParseErrorNamesLine) {
  const auto p = write("z.txt", "14.134725\n# fine\n21.02x\n");
  EXPECT_EQ(code_of([&] { load_text(p); }), ErrorCode::parse_error);
  try {
    load_text(p);
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find(":3:"), std::string::npos) << e.what();
  }
}

TEST_F(ZeroIo, FirstZeroMismatch) {
  EXPECT_EQ(code_of([&] { load_text(write("z.txt", "14.2\n21.0\n")); }),
            ErrorCode::validation_error);
  // low-precision tables pass
  EXPECT_EQ(load_text(write("ok.txt", "14.134727\n")).count(), 1u);
}

TEST_F(ZeroIo, EmptyFiles) {
  EXPECT_EQ(load_text(write("e.txt", "")).count(), 0u);
  EXPECT_EQ(load_binary(write("e.bin", "")).count(), 0u);
}

TEST_F(ZeroIo, BinaryRoundTripIsBitExact) {
  std::mt19937_64 rng(1);
  std::vector<double> v{14.134725141734693};
  std::uniform_real_distribution<double> gap(1e-6, 3.0);
  for (int i = 0; i < 1000; ++i) v.push_back(v.back() + gap(rng));
  const ZeroTable zt(v, "synthetic");
  write_binary(zt, path("z.bin"));
  EXPECT_EQ(load_binary(path("z.bin")), zt);
  EXPECT_EQ(std::filesystem::file_size(path("z.bin")), 8 * v.size());
}

TEST_F(ZeroIo, TextRoundTripIsIdempotent) {
  std::mt19937_64 rng(2);
  std::vector<double> v{14.134725141734693};
  std::uniform_real_distribution<double> gap(1e-3, 2.0);
  for (int i = 0; i < 500; ++i) v.push_back(v.back() + gap(rng));
  write_text(ZeroTable(v, "s"), path("a.txt"));
  const auto once = load_text(path("a.txt"));
  write_text(once, path("b.txt"));
  const auto twice = load_text(path("b.txt"));
  EXPECT_EQ(once, twice);
  EXPECT_EQ(once, ZeroTable(v, "s"));  // 17 digits round-trip binary64
}

TEST_F(ZeroIo, TruncatedBinaryIsFormatError) {
  EXPECT_EQ(code_of([&] { load_binary(write("t.bin", std::string(12, '\0'))); }),
            ErrorCode::format_error);
}

TEST_F(ZeroIo, ThreeFloatBinary) {
  const ZeroTable zt({14.134725, 21.022040, 25.010858}, "three");
  write_binary(zt, path("3.bin"));
  const auto back = load_binary(path("3.bin"));
  EXPECT_EQ(back.count(), 3u);
  EXPECT_EQ(back, zt);
}

TEST(TakeFirst, Prefixes) {
  const ZeroTable zt({14.134725, 21.022040, 25.010858}, "three");
  const auto two = take_first(zt, 2);
  EXPECT_EQ(two.count(), 2u);
  EXPECT_EQ(two.ordinates()[1], 21.022040);
  EXPECT_NE(two.source().find("first 2"), std::string::npos);
  EXPECT_EQ(take_first(zt, 0).count(), 0u);
  EXPECT_EQ(take_first(zt, 3), zt);
  EXPECT_EQ(code_of([&] { take_first(zt, 4); }), ErrorCode::range_error);
}

TEST(ZeroFixture, MatchesIndependentReferenceZeros) {
  const auto zt = load_binary(RZSTATS_ZEROS_FIXTURE);
  ASSERT_EQ(zt.count(), 100000u);
  // mpmath.zetazero
  EXPECT_NEAR(zt.ordinates()[0], 14.134725141734693790, 1e-9);
  EXPECT_NEAR(zt.ordinates()[29], 101.31785100573139123, 1e-9);
  EXPECT_NEAR(zt.ordinates()[9999], 9877.7826540055011428, 1e-6);
  EXPECT_NEAR(zt.ordinates()[99999], 74920.827498994186794, 1e-6);
}
