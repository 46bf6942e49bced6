#pragma once

// Dataset container: a directory with
//   meta       JSON object {rows, cols, bands, dtype: "f64le", classes?: K}
//   cube.bin   rows*cols*bands little-endian float64, (row, col, band) order
//   labels.bin rows*cols little-endian uint16, row-major (optional)

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hsir/error.hpp"
#include "hsir/types.hpp"

namespace hsir {

struct Dataset {
  HsiCube cube;
  std::optional<LabelMap> labels;
};

namespace detail {

inline std::vector<char> read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw FormatError("cannot open " + p.string());
  return std::vector<char>(std::istreambuf_iterator<char>(in), {});
}

inline void write_file(const std::filesystem::path& p, const std::string& bytes) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot write " + p.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw FormatError("write failed: " + p.string());
}

template <class UInt>
UInt load_le(const unsigned char* p) {
  UInt v = 0;
  for (std::size_t i = 0; i < sizeof(UInt); ++i) v |= static_cast<UInt>(p[i]) << (8 * i);
  return v;
}

template <class UInt>
void store_le(std::string& out, UInt v) {
  for (std::size_t i = 0; i < sizeof(UInt); ++i)
    out.push_back(static_cast<char>((v >> (8 * i)) & 0xFFu));
}

inline std::vector<double> decode_f64le(const std::vector<char>& bytes) {
  std::vector<double> out(bytes.size() / 8);
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = std::bit_cast<double>(load_le<std::uint64_t>(p + 8 * i));
  return out;
}

inline std::string encode_f64le(std::span<const double> values) {
  std::string out;
  out.reserve(values.size() * 8);
  for (double v : values) store_le(out, std::bit_cast<std::uint64_t>(v));
  return out;
}

inline Index meta_dim(const nlohmann::json& meta, const char* key) {
  if (!meta.contains(key)) throw FormatError(std::string("meta: missing field '") + key + "'");
  const auto& v = meta.at(key);
  if (!v.is_number_integer() || v.get<long long>() <= 0)
    throw FormatError(std::string("meta: field '") + key + "' must be a positive integer");
  return static_cast<Index>(v.get<long long>());
}

}  // namespace detail

inline Dataset load_cube(const std::filesystem::path& dir) {
  nlohmann::json meta;
  {
    const auto raw = detail::read_file(dir / "meta");
    meta = nlohmann::json::parse(raw.begin(), raw.end(), nullptr, false);
    if (meta.is_discarded() || !meta.is_object()) throw FormatError("meta: not a JSON object");
  }
  const Index rows = detail::meta_dim(meta, "rows");
  const Index cols = detail::meta_dim(meta, "cols");
  const Index bands = detail::meta_dim(meta, "bands");
  if (!meta.contains("dtype")) throw FormatError("meta: missing field 'dtype'");
  if (!meta["dtype"].is_string() || meta["dtype"].get<std::string>() != "f64le")
    throw FormatError("meta: field 'dtype' must be \"f64le\"");
  std::optional<int> declared_classes;
  if (meta.contains("classes")) {
    const auto& k = meta["classes"];
    if (!k.is_number_integer() || k.get<long long>() < 0)
      throw FormatError("meta: field 'classes' must be a non-negative integer");
    declared_classes = k.get<int>();
  }

  const auto cube_bytes = detail::read_file(dir / "cube.bin");
  const std::size_t expected = rows * cols * bands * 8;
  if (cube_bytes.size() != expected)
    throw IntegrityError("cube.bin: header declares " + std::to_string(rows * cols * bands) +
                         " values (" + std::to_string(expected) + " bytes), payload has " +
                         std::to_string(cube_bytes.size()) + " bytes");
  Dataset ds{HsiCube(rows, cols, bands, detail::decode_f64le(cube_bytes)), std::nullopt};

  const auto label_path = dir / "labels.bin";
  if (std::filesystem::exists(label_path)) {
    const auto lb = detail::read_file(label_path);
    if (lb.size() != rows * cols * 2)
      throw IntegrityError("labels.bin: expected " + std::to_string(rows * cols * 2) +
                           " bytes, payload has " + std::to_string(lb.size()));
    std::vector<std::uint16_t> labels(rows * cols);
    const auto* p = reinterpret_cast<const unsigned char*>(lb.data());
    for (std::size_t i = 0; i < labels.size(); ++i) labels[i] = detail::load_le<std::uint16_t>(p + 2 * i);
    ds.labels.emplace(rows, cols, std::move(labels));
    if (declared_classes && *declared_classes != ds.labels->classes())
      throw IntegrityError("labels.bin: meta declares " + std::to_string(*declared_classes) +
                           " classes, labels hold " + std::to_string(ds.labels->classes()));
  }
  return ds;
}

inline void save_cube(const std::filesystem::path& dir, const HsiCube& cube,
                      const std::optional<LabelMap>& labels = std::nullopt) {
  std::filesystem::create_directories(dir);
  nlohmann::ordered_json meta;
  meta["rows"] = cube.rows();
  meta["cols"] = cube.cols();
  meta["bands"] = cube.bands();
  meta["dtype"] = "f64le";
  if (labels) {
    if (labels->rows() != cube.rows() || labels->cols() != cube.cols())
      throw ShapeError("save_cube: label map shape differs from cube");
    meta["classes"] = labels->classes();
  }
  detail::write_file(dir / "meta", meta.dump(2) + "\n");
  detail::write_file(dir / "cube.bin", detail::encode_f64le(cube.values()));
  if (labels) {
    std::string lb;
    lb.reserve(labels->labels().size() * 2);
    for (auto l : labels->labels()) detail::store_le<std::uint16_t>(lb, l);
    detail::write_file(dir / "labels.bin", lb);
  } else {
    std::filesystem::remove(dir / "labels.bin");
  }
}

}  // namespace hsir
