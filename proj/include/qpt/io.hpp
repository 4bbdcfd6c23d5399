#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "qpt/continuation.hpp"
#include "qpt/seeding.hpp"

namespace qpt {

using Json = nlohmann::json;

std::string base64_encode(const std::uint8_t* data, std::size_t len);
std::vector<std::uint8_t> base64_decode(const std::string& text);

/// Lossless float64 array transport (little-endian bytes in base64).
std::string encode_doubles(const std::vector<double>& v);
std::vector<double> decode_doubles(const std::string& text);

/// FNV-1a 64-bit content hash, hex encoded; used for provenance stamps.
std::string content_hash(const std::string& text);

/// Write-temp-then-rename so readers never observe partial files.
void atomic_write(const std::filesystem::path& path, const std::string& content);

std::string read_file(const std::filesystem::path& path);

Json torus_to_json(const TorusCircle& k, const BundleSet& b);
void torus_from_json(const Json& j, TorusCircle& k, BundleSet& b);

Json report_to_json(const NewtonReport& rep);
NewtonReport report_from_json(const Json& j);

Json orbit_to_json(const PeriodicOrbit& po);
PeriodicOrbit orbit_from_json(const Json& j);

Json step_to_json(const StepEntry& e);
StepEntry step_from_json(const Json& j);

Json run_summary_json(const ContinuationRun& run);

Frame frame_from_name(const std::string& name);

}  // namespace qpt
