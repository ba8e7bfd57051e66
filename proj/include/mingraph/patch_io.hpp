#ifndef MINGRAPH_PATCH_IO_HPP
#define MINGRAPH_PATCH_IO_HPP

// MGP1 patch files: a JSON manifest
//   {"format":"MGP1","n":..,"m":..,"dims":[..],"spacing":..,"origin":[..],"data":"<path>"}
// next to a raw file of little-endian float64 values, node-major with the
// last axis varying fastest and m consecutive components per node. A relative
// data path is resolved against the manifest's directory.

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "mingraph/error.hpp"
#include "mingraph/mss_solver.hpp"

namespace mingraph {

namespace detail {

inline std::uint64_t to_little_endian(std::uint64_t bits) {
  if constexpr (std::endian::native == std::endian::little) {
    return bits;
  } else {
    std::uint64_t out = 0;
    for (int k = 0; k < 8; ++k) out |= ((bits >> (8 * k)) & 0xffu) << (8 * (7 - k));
    return out;
  }
}

}  // namespace detail

inline nlohmann::json patch_manifest(const GraphPatch& patch, const std::string& data_path) {
  nlohmann::json j;
  j["format"] = "MGP1";
  j["n"] = patch.n();
  j["m"] = patch.m();
  j["dims"] = patch.dims();
  j["spacing"] = patch.spacing();
  j["origin"] = std::vector<double>(patch.origin().data(), patch.origin().data() + patch.origin().size());
  j["data"] = data_path;
  return j;
}

/// Writes `<manifest>` and its binary payload. The payload name defaults to the
/// manifest stem with a ".bin" extension, stored next to the manifest.
inline void write_patch(const GraphPatch& patch, const std::filesystem::path& manifest,
                        std::string data_name = {}) {
  if (data_name.empty()) data_name = manifest.stem().string() + ".bin";
  const auto data_path = manifest.parent_path() / data_name;
  {
    std::ofstream bin(data_path, std::ios::binary | std::ios::trunc);
    if (!bin) throw InvalidInput("write_patch: cannot open " + data_path.string());
    for (double x : patch.data()) {
      const std::uint64_t bits = detail::to_little_endian(std::bit_cast<std::uint64_t>(x));
      bin.write(reinterpret_cast<const char*>(&bits), sizeof(bits));
    }
    if (!bin) throw InvalidInput("write_patch: write failed for " + data_path.string());
  }
  std::ofstream out(manifest, std::ios::trunc);
  if (!out) throw InvalidInput("write_patch: cannot open " + manifest.string());
  out << patch_manifest(patch, data_name).dump(2) << "\n";
}

inline GraphPatch read_patch(const std::filesystem::path& manifest) {
  std::ifstream in(manifest);
  if (!in) throw InvalidInput("read_patch: cannot open " + manifest.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(std::string("read_patch: malformed manifest: ") + e.what());
  }
  try {
    if (j.at("format").get<std::string>() != "MGP1") throw InvalidInput("read_patch: format is not MGP1");
    const int n = j.at("n").get<int>();
    const int m = j.at("m").get<int>();
    const auto dims = j.at("dims").get<std::vector<int>>();
    const auto origin_v = j.at("origin").get<std::vector<double>>();
    if (static_cast<int>(dims.size()) != n || static_cast<int>(origin_v.size()) != n)
      throw InvalidInput("read_patch: dims/origin length differs from n");
    Vector origin = Eigen::Map<const Vector>(origin_v.data(), n);
    GraphPatch patch(m, dims, j.at("spacing").get<double>(), origin);

    std::filesystem::path data = j.at("data").get<std::string>();
    if (data.is_relative()) data = manifest.parent_path() / data;
    std::ifstream bin(data, std::ios::binary);
    if (!bin) throw InvalidInput("read_patch: cannot open data file " + data.string());
    const auto expected = static_cast<std::uintmax_t>(patch.data().size() * sizeof(double));
    if (std::filesystem::file_size(data) != expected)
      throw InvalidInput("read_patch: data file size does not match dims * m * 8");
    for (double& x : patch.data()) {
      std::uint64_t bits = 0;
      bin.read(reinterpret_cast<char*>(&bits), sizeof(bits));
      x = std::bit_cast<double>(detail::to_little_endian(bits));
    }
    if (!patch.all_finite()) throw InvalidInput("read_patch: non-finite value in data file");
    return patch;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(std::string("read_patch: bad manifest field: ") + e.what());
  }
}

}  // namespace mingraph

#endif  // MINGRAPH_PATCH_IO_HPP
