/**
 * @file io.hpp
 * @brief Field snapshots (raw little-endian float64 per component plus a JSON
 *        sidecar), raw state blobs for checkpoints, and SHA-256 hashing.
 */
#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>
#include <openssl/evp.h>

#include "sabi/grid.hpp"

namespace sabi {

namespace fs = std::filesystem;

namespace detail {

inline std::uint64_t to_little_endian(std::uint64_t v) {
  if constexpr (std::endian::native == std::endian::little) {
    return v;
  } else {
    return __builtin_bswap64(v);
  }
}

}  // namespace detail

inline void write_doubles(std::ostream& os, const std::vector<double>& values) {
  std::vector<std::uint64_t> raw(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) raw[i] = detail::to_little_endian(std::bit_cast<std::uint64_t>(values[i]));
  os.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size() * sizeof(std::uint64_t)));
  if (!os) throw std::runtime_error("write failed");
}

inline std::vector<double> read_doubles(std::istream& is, std::size_t count) {
  std::vector<std::uint64_t> raw(count);
  is.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(count * sizeof(std::uint64_t)));
  if (static_cast<std::size_t>(is.gcount()) != count * sizeof(std::uint64_t)) {
    throw std::runtime_error("unexpected end of binary data");
  }
  std::vector<double> out(count);
  for (std::size_t i = 0; i < count; ++i) out[i] = std::bit_cast<double>(detail::to_little_endian(raw[i]));
  return out;
}

inline void write_binary_file(const fs::path& path, const std::vector<double>& values) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("cannot write '" + path.string() + "'");
  write_doubles(os, values);
}

inline std::vector<double> read_binary_file(const fs::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot read '" + path.string() + "'");
  is.seekg(0, std::ios::end);
  const auto bytes = static_cast<std::size_t>(is.tellg());
  is.seekg(0);
  if (bytes % sizeof(double) != 0) throw std::runtime_error("'" + path.string() + "' is not a float64 array");
  return read_doubles(is, bytes / sizeof(double));
}

struct SnapshotMeta {
  std::string field;
  double time = 0.0;
  long step = 0;
  std::uint64_t seed = 0;
};

/// Writes <stem>_<c>.bin for c in x, y, z and <stem>.json; returns all paths written.
inline std::vector<fs::path> write_snapshot(const fs::path& dir, const std::string& stem, const VectorField& v,
                                            const SnapshotMeta& meta) {
  const char* names[3] = {"x", "y", "z"};
  std::vector<fs::path> written;
  nlohmann::json side;
  side["field"] = meta.field;
  side["time"] = meta.time;
  side["step"] = meta.step;
  side["seed"] = meta.seed;
  side["grid"] = {v.grid.nx, v.grid.ny, v.grid.nz};
  side["lengths"] = {v.grid.lx, v.grid.ly, v.grid.lz};
  side["layout"] = "float64 little-endian, x fastest";
  for (int d = 0; d < 3; ++d) {
    const fs::path p = dir / (stem + "_" + names[d] + ".bin");
    write_binary_file(p, v[d].values);
    side["components"][names[d]] = p.filename().string();
    written.push_back(p);
  }
  const fs::path sp = dir / (stem + ".json");
  std::ofstream(sp) << side.dump(2) << '\n';
  written.insert(written.begin(), sp);
  return written;
}

inline VectorField read_snapshot(const fs::path& sidecar, SnapshotMeta* meta = nullptr) {
  std::ifstream in(sidecar);
  if (!in) throw std::runtime_error("cannot read '" + sidecar.string() + "'");
  const auto side = nlohmann::json::parse(in);
  GridSpec g;
  g.nx = side.at("grid")[0];
  g.ny = side.at("grid")[1];
  g.nz = side.at("grid")[2];
  g.lx = side.at("lengths")[0];
  g.ly = side.at("lengths")[1];
  g.lz = side.at("lengths")[2];
  VectorField v(g);
  const char* names[3] = {"x", "y", "z"};
  for (int d = 0; d < 3; ++d) {
    auto values = read_binary_file(sidecar.parent_path() / side.at("components").at(names[d]).get<std::string>());
    if (values.size() != g.size()) throw std::runtime_error("snapshot component has the wrong size");
    v[d].values = std::move(values);
  }
  if (meta) {
    meta->field = side.at("field");
    meta->time = side.at("time");
    meta->step = side.at("step");
    meta->seed = side.at("seed");
  }
  return v;
}

inline std::string sha256_hex(const std::string& data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 computation failed");
  }
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 0xf];
  }
  return out;
}

}  // namespace sabi
