#pragma once

// Transform spec JSON and vector files.
//
// Binary vector layout (little-endian):
//   "FJLP" | u16 version=1 | u8 dtype=0 (f64) | u8 reserved=0 |
//   u64 count | u64 dim | count*dim f64 values, row-major.

#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "fjlp/embed.hpp"
#include "fjlp/error.hpp"

namespace fjlp::io {

static_assert(std::endian::native == std::endian::little,
              "binary vector I/O assumes a little-endian host");

enum class VectorFormat { csv, binary };

struct VectorSet {
  std::vector<RealVector> rows;
  VectorFormat format = VectorFormat::csv;
};

inline constexpr std::array<char, 4> kMagic{'F', 'J', 'L', 'P'};
inline constexpr std::uint16_t kBinaryVersion = 1;

// ---- transform spec --------------------------------------------------------

inline nlohmann::json transform_to_json(const Transform& t) {
  return nlohmann::json{{"version", 1},
                        {"d", t.input_dim()},
                        {"d_pad", t.padded_dim()},
                        {"k", t.output_dim()},
                        {"p", t.p()},
                        {"seed", t.seed()},
                        {"field_m", t.matrix().field().degree()},
                        {"field_poly", t.matrix().field().modulus_hex()},
                        {"convention", "signed"},
                        {"scale", t.scale()},
                        {"strict", t.gate() == KGate::strict}};
}

/// Rebuilds a Transform from its spec. The derived fields (d_pad, field_m,
/// field_poly) must match what planning produces.
inline Transform transform_from_json(const nlohmann::json& j) {
  try {
    if (j.at("version").get<int>() != 1) throw FormatError("unsupported transform spec version");
    if (j.contains("convention") && j.at("convention").get<std::string>() != "signed")
      throw FormatError("unsupported sign convention");
    const auto d = j.at("d").get<std::uint64_t>();
    const auto k = j.at("k").get<std::size_t>();
    const auto p = j.at("p").get<double>();
    const auto seed = j.at("seed").get<std::uint64_t>();
    const bool strict = j.value("strict", true);
    Transform t(d, k, p, seed, strict ? KGate::strict : KGate::relaxed);
    if (j.contains("d_pad") && j.at("d_pad").get<std::uint64_t>() != t.padded_dim())
      throw FormatError("d_pad does not match the padding rule");
    if (j.contains("field_m") && j.at("field_m").get<unsigned>() != t.matrix().field().degree())
      throw FormatError("field_m does not match d_pad");
    if (j.contains("field_poly")) {
      const auto s = j.at("field_poly").get<std::string>();
      std::uint64_t poly = 0;
      const bool hex = s.size() > 2 && s[0] == '0' && (s[1] == 'x' || s[1] == 'X');
      const auto [ptr, ec] = std::from_chars(s.data() + (hex ? 2 : 0), s.data() + s.size(), poly, 16);
      if (!hex || ec != std::errc{} || ptr != s.data() + s.size())
        throw FormatError("field_poly must be a hex string such as \"0x25\"");
      if (poly != t.matrix().field().modulus()) throw FormatError("field_poly does not match");
    }
    return t;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("transform spec: ") + e.what());
  }
}

inline Transform read_transform(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(path + ": " + e.what());
  }
  return transform_from_json(j);
}

// ---- CSV -------------------------------------------------------------------

inline std::vector<RealVector> parse_csv(std::string_view text) {
  std::vector<RealVector> rows;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    RealVector row;
    while (true) {
      const auto comma = line.find(',');
      std::string_view field = line.substr(0, comma);
      while (!field.empty() && field.front() == ' ') field.remove_prefix(1);
      while (!field.empty() && field.back() == ' ') field.remove_suffix(1);
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
      if (ec != std::errc{} || ptr != field.data() + field.size() || field.empty())
        throw FormatError("csv line " + std::to_string(line_no) + ": bad number '" +
                          std::string(field) + "'");
      row.push_back(v);
      if (comma == std::string_view::npos) break;
      line.remove_prefix(comma + 1);
    }
    if (!rows.empty() && row.size() != rows.front().size())
      throw FormatError("csv line " + std::to_string(line_no) + ": ragged row");
    rows.push_back(std::move(row));
  }
  return rows;
}

// Shortest round-trip representation per value.
inline std::string format_csv(const std::vector<RealVector>& rows) {
  std::string out;
  char buf[64];
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out.push_back(',');
      const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, row[i]);
      out.append(buf, ptr);
    }
    out.push_back('\n');
  }
  return out;
}

// ---- binary ----------------------------------------------------------------

inline std::string format_binary(const std::vector<RealVector>& rows) {
  const std::uint64_t count = rows.size();
  const std::uint64_t dim = rows.empty() ? 0 : rows.front().size();
  std::string out(kMagic.begin(), kMagic.end());
  auto put = [&out](const void* p, std::size_t n) {
    out.append(static_cast<const char*>(p), n);
  };
  const std::uint16_t version = kBinaryVersion;
  const std::uint8_t dtype = 0, reserved = 0;
  put(&version, 2);
  put(&dtype, 1);
  put(&reserved, 1);
  put(&count, 8);
  put(&dim, 8);
  for (const auto& row : rows) {
    if (row.size() != dim) throw std::invalid_argument("binary writer: ragged rows");
    put(row.data(), row.size() * sizeof(double));
  }
  return out;
}

inline std::vector<RealVector> parse_binary(std::string_view bytes) {
  constexpr std::size_t kHeader = 4 + 2 + 1 + 1 + 8 + 8;
  if (bytes.size() < kHeader) throw FormatError("binary vectors: truncated header");
  if (std::memcmp(bytes.data(), kMagic.data(), 4) != 0)
    throw FormatError("binary vectors: bad magic");
  std::uint16_t version;
  std::uint8_t dtype, reserved;
  std::uint64_t count, dim;
  std::memcpy(&version, bytes.data() + 4, 2);
  std::memcpy(&dtype, bytes.data() + 6, 1);
  std::memcpy(&reserved, bytes.data() + 7, 1);
  std::memcpy(&count, bytes.data() + 8, 8);
  std::memcpy(&dim, bytes.data() + 16, 8);
  if (version != kBinaryVersion) throw FormatError("binary vectors: unsupported version");
  if (dtype != 0) throw FormatError("binary vectors: unsupported dtype");
  if (reserved != 0) throw FormatError("binary vectors: reserved byte must be 0");
  const std::size_t payload = bytes.size() - kHeader;
  if (dim != 0 && count > payload / 8 / dim) throw FormatError("binary vectors: truncated payload");
  if (count * dim * 8 != payload) throw FormatError("binary vectors: payload size mismatch");
  std::vector<RealVector> rows(count, RealVector(dim));
  const char* p = bytes.data() + kHeader;
  for (auto& row : rows) {
    std::memcpy(row.data(), p, dim * sizeof(double));
    p += dim * sizeof(double);
  }
  return rows;
}

// ---- files -----------------------------------------------------------------

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

inline void write_file(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot write " + path);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw FormatError("write failed: " + path);
}

/// Detects the format from the leading magic bytes.
inline VectorSet parse_vectors(std::string_view bytes) {
  if (bytes.size() >= 4 && std::memcmp(bytes.data(), kMagic.data(), 4) == 0)
    return {parse_binary(bytes), VectorFormat::binary};
  return {parse_csv(bytes), VectorFormat::csv};
}

inline std::string format_vectors(const std::vector<RealVector>& rows, VectorFormat f) {
  return f == VectorFormat::binary ? format_binary(rows) : format_csv(rows);
}

inline VectorSet read_vectors(const std::string& path) { return parse_vectors(read_file(path)); }

inline void write_vectors(const std::string& path, const std::vector<RealVector>& rows,
                          VectorFormat f) {
  write_file(path, format_vectors(rows, f));
}

}  // namespace fjlp::io
