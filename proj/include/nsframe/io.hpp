#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "nsframe/certify.hpp"
#include "nsframe/nsgt.hpp"
#include "nsframe/windows.hpp"

namespace nsframe {

inline constexpr int kConfigSchema = 1;
inline constexpr const char* kToolVersion = "0.1.0";

struct ReferenceBounds {
  double A = 0.0;
  std::optional<double> B;
};

// Profile entry as written in a config; the center comes from the matching
// window and a gap profile without half_gap uses 1 / (2 b_k).
struct ProfileConfig {
  double C = 0.0;
  double p = 0.0;
  DecayShape shape = DecayShape::centered;
  std::optional<double> half_gap;
};

struct ScaleSequenceConfig {
  ScaleSequence sequence;
  double a0 = 0.0;
  std::optional<double> bandlimit;  // convolve with the raised-cosine filter of this bandwidth
  bool truncate = false;            // cut every window to [a_k - 1/(2 b_k), a_k + 1/(2 b_k))
};

struct ExistenceConfig {
  std::vector<double> centers;
  double A0 = 0.0;
  std::optional<double> B0;
  std::optional<double> mu;
  bool frequency_side = false;
};

// Strictly parsed system description; unknown keys are rejected.
struct SystemConfig {
  std::optional<double> dt;
  std::optional<std::size_t> L;
  std::vector<NsgEntry> windows;
  std::optional<double> delta;
  std::optional<FrequencyRange> b_range;
  std::optional<std::vector<ProfileConfig>> profiles;
  std::optional<ReferenceBounds> reference;
  std::optional<std::vector<NsgEntry>> reference_windows;
  std::optional<ScaleSequenceConfig> scale_sequence;
  std::optional<ExistenceConfig> existence;

  bool has_system() const { return !windows.empty() || scale_sequence.has_value(); }
  // Throws InputError when the config holds no windows.
  NsgSystem system() const;
  std::optional<NsgSystem> reference_system() const;
  // Profiles anchored at the centers of `sys`; InputError when absent or mismatched.
  std::vector<DecayProfile> resolved_profiles(const NsgSystem& sys) const;
};

// Throws InputError naming the offending key.
SystemConfig parse_config(const nlohmann::json& j);
SystemConfig load_config(const std::filesystem::path& path);
nlohmann::json to_json(const SystemConfig& config);

nlohmann::json window_to_json(const WindowSpec& spec);
WindowSpec window_from_json(const nlohmann::json& j, const std::string& path = "window");

// Report = certificate fields + tool version + provenance; `timing` is kept in
// its own top-level field so the rest can be compared byte for byte.
nlohmann::json certificate_to_json(const FrameCertificate& certificate,
                                   std::optional<double> wall_seconds = std::nullopt);
FrameCertificate certificate_from_json(const nlohmann::json& j);

// Binary formats, little-endian: coefficient files start with "NSGC", u32
// version 1, u32 K, then per row u32 M_k and M_k (f64 re, f64 im) pairs.
// Signals are headerless f64 sequences.
void write_coefficients(const std::filesystem::path& path, const CoefficientSet& coefficients);
CoefficientSet read_coefficients(const std::filesystem::path& path);
void write_signal(const std::filesystem::path& path, const std::vector<double>& signal);
std::vector<double> read_signal(const std::filesystem::path& path);

}  // namespace nsframe
