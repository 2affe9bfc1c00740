#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "rlos/field.hpp"
#include "rlos/fom.hpp"
#include "rlos/precoding.hpp"
#include "rlos/sweep.hpp"
#include "rlos/tolerance.hpp"

namespace rlos {

inline constexpr std::string_view kVersion = "1.0.0";

/// (IES, D) pair in meters.
struct GeometryM {
    double ies_m = 0.0;
    double d_m = 0.0;

    friend bool operator==(const GeometryM&, const GeometryM&) = default;
};

/**
 * Fully validated run configuration. All lengths are stored in meters;
 * the JSON form accepts `*_lambda` keys (converted once, at parse time) or
 * `*_m` keys, but not both for the same quantity.
 */
struct RunConfig {
    double frequency_hz = 28e9;
    LayoutConfig layout;
    double tz_radius_m = 0.0;
    double mesh_pitch_m = 0.0;

    std::vector<double> ies_m;
    std::vector<double> d_m;
    double d_step_lambda = 1.0;
    std::vector<FomLimits> tiers;
    int fom_tier = 1;

    std::vector<GeometryM> tolerance_geometries;
    double tolerance_step_db = 0.01;
    std::size_t tolerance_n_mc = 100;
    int tolerance_tier = 1;
    double tolerance_max_sigma_db = 2.0;
    LevelRule tolerance_rule = LevelRule::sequential_runs;

    std::vector<GeometryM> precode_geometries;
    std::vector<double> snr_db;
    std::vector<double> sigma_dut_db;
    std::vector<double> alpha_offsets_deg;
    std::vector<Precoder> precoders;
    std::size_t precode_n_mc = 1000;
    std::size_t dut_elements = 49;
    double dut_ies_m = 0.0;

    std::uint64_t seed = 1;
    std::string output_dir = ".";

    WaveSpec wave() const { return WaveSpec(frequency_hz); }
    TestZoneSpec zone(double d_m) const { return {d_m, tz_radius_m, mesh_pitch_m}; }
    SweepGrid sweep_grid() const;
    ToleranceSearchConfig tolerance_config() const;
    StudyConfig study_config() const;

    /// Checks every field against the preconditions of the module that consumes it.
    void validate() const;

    friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

/// The compact setups used for the tolerance and precoding studies, in wavelengths.
std::vector<GeometryM> reference_geometries(const WaveSpec& wave);

/// Parses and validates; unknown keys and bad values raise ValidationError naming the key.
RunConfig parse_config(const nlohmann::json& doc);
RunConfig parse_config_text(std::string_view text);
RunConfig load_config(const std::filesystem::path& path);

/// Canonical JSON form (meters, every key present); parse_config(to_json(c)) == c.
nlohmann::json to_json(const RunConfig& config);

/// FNV-1a 64 of the canonical JSON text.
std::uint64_t config_hash(const RunConfig& config);

}  // namespace rlos
