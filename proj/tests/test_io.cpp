#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <limits>
#include <random>

#include "fjlp/io.hpp"
#include "test_support.hpp"

using namespace fjlp;

namespace {

std::vector<RealVector> random_rows(std::mt19937_64& gen) {
  const std::size_t n = gen() % 6, d = 1 + gen() % 9;
  std::vector<RealVector> rows(n, RealVector(d));
  std::uniform_int_distribution<int> exp(-300, 300);
  std::normal_distribution<double> normal;
  for (auto& r : rows)
    for (double& v : r) {
      switch (gen() % 4) {
        case 0: v = normal(gen); break;
        case 1: v = std::ldexp(normal(gen), exp(gen)); break;
        case 2: v = static_cast<double>(static_cast<std::int64_t>(gen() % 2001) - 1000); break;
        default: v = std::numeric_limits<double>::denorm_min() * static_cast<double>(gen() % 7); break;
      }
    }
  return rows;
}

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("fjlp_io_" + name)).string();
}

}  // namespace

TEST(Io, CsvRoundTripIsExact) {
  std::mt19937_64 gen(1);
  for (int t = 0; t < 500; ++t) {
    const auto rows = random_rows(gen);
    EXPECT_EQ(io::parse_csv(io::format_csv(rows)), rows);
  }
}

TEST(Io, BinaryRoundTripIsExact) {
  std::mt19937_64 gen(2);
  for (int t = 0; t < 500; ++t) {
    const auto rows = random_rows(gen);
    const auto bytes = io::format_binary(rows);
    EXPECT_EQ(bytes.substr(0, 4), "FJLP");
    const auto back = io::parse_binary(bytes);
    if (rows.empty())
      EXPECT_TRUE(back.empty());
    else
      EXPECT_EQ(back, rows);
  }
}

TEST(Io, BinaryLayout) {
  const auto bytes = io::format_binary({{1.0, 2.0}, {3.0, 4.0}, {5.0, 6.0}});
  ASSERT_EQ(bytes.size(), 24u + 6 * 8);
  EXPECT_EQ(static_cast<unsigned char>(bytes[4]), 1);  // version, little-endian
  EXPECT_EQ(static_cast<unsigned char>(bytes[5]), 0);
  EXPECT_EQ(static_cast<unsigned char>(bytes[6]), 0);  // dtype f64
  EXPECT_EQ(static_cast<unsigned char>(bytes[8]), 3);  // count
  EXPECT_EQ(static_cast<unsigned char>(bytes[16]), 2);  // dim
}

TEST(Io, FormatDetection) {
  EXPECT_EQ(io::parse_vectors(io::format_binary({{1.0}})).format, io::VectorFormat::binary);
  EXPECT_EQ(io::parse_vectors("1,2\n3,4\n").format, io::VectorFormat::csv);
  EXPECT_EQ(io::parse_vectors("1, 2\r\n\n3 ,4").rows, (std::vector<RealVector>{{1, 2}, {3, 4}}));
}

TEST(Io, MalformedInputsAreFormatErrors) {
  EXPECT_THROW(io::parse_csv("1,2\n3\n"), FormatError);
  EXPECT_THROW(io::parse_csv("1,abc\n"), FormatError);
  EXPECT_THROW(io::parse_csv("1,,2\n"), FormatError);
  EXPECT_THROW(io::parse_binary("FJL"), FormatError);
  EXPECT_THROW(io::parse_binary("XXXX" + std::string(20, '\0')), FormatError);
  auto bytes = io::format_binary({{1.0, 2.0}});
  EXPECT_THROW(io::parse_binary(bytes.substr(0, bytes.size() - 1)), FormatError);
  auto bad_version = bytes;
  bad_version[4] = 2;
  EXPECT_THROW(io::parse_binary(bad_version), FormatError);
  auto bad_dtype = bytes;
  bad_dtype[6] = 1;
  EXPECT_THROW(io::parse_binary(bad_dtype), FormatError);
  EXPECT_THROW(io::read_file(temp_path("does_not_exist")), FormatError);
}

TEST(Io, TransformSpecRoundTrip) {
  const Transform t(1000, 5, 1.0, 7);
  const auto j = io::transform_to_json(t);
  EXPECT_EQ(j["d_pad"], 1024);
  EXPECT_EQ(j["field_m"], 5);
  EXPECT_EQ(j["field_poly"], "0x25");
  EXPECT_EQ(j["convention"], "signed");
  EXPECT_EQ(j["strict"], true);
  const Transform back = io::transform_from_json(j);
  const auto x = fjlp::testing::gaussian_vector(1000, 3);
  EXPECT_EQ(back.apply(x), t.apply(x));

  const auto path = temp_path("spec.json");
  io::write_file(path, j.dump());
  EXPECT_EQ(io::read_transform(path).apply(x), t.apply(x));
  std::remove(path.c_str());
}

TEST(Io, TransformSpecMismatchesAreRejected) {
  const auto good = io::transform_to_json(Transform(1000, 5, 1.0, 7));
  for (const auto& [key, value] : std::vector<std::pair<std::string, nlohmann::json>>{
           {"d_pad", 4096}, {"field_m", 6}, {"field_poly", "0x29"}, {"field_poly", "37"},
           {"version", 2}, {"convention", "boolean"}, {"seed", "seven"}}) {
    auto j = good;
    j[key] = value;
    EXPECT_THROW(io::transform_from_json(j), FormatError) << key;
  }
  auto missing = good;
  missing.erase("k");
  EXPECT_THROW(io::transform_from_json(missing), FormatError);
}
