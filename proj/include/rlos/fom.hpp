#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "rlos/field.hpp"
#include "rlos/mesh.hpp"

namespace rlos {

/// Test-zone figures of merit, in their fixed attribution order.
enum class Fom { r_mag, sigma_mag, r_phs };

std::string_view to_string(Fom fom);

/// Acceptance thresholds for one limit tier.
struct FomLimits {
    double sigma_mag_max_db = 0.25;
    double r_mag_max_db = 1.0;
    double r_phs_max_deg = 10.0;

    /// Tier 1 (0.25 dB, 1 dB, 10 deg), tier 2 (0.225 dB, 0.9 dB, 9 deg), tier 3 (0.2 dB, 0.8 dB, 8 deg).
    static FomLimits tier(int index);
    /// Limits nothing can violate.
    static FomLimits unlimited();

    void validate() const;

    friend bool operator==(const FomLimits&, const FomLimits&) = default;
};

struct FomValues {
    double r_mag_db = 0.0;
    double sigma_mag_db = 0.0;
    double r_phs_deg = 0.0;

    friend bool operator==(const FomValues&, const FomValues&) = default;
};

struct FomReport {
    double r_mag_db = 0.0;
    double sigma_mag_db = 0.0;
    double r_phs_deg = 0.0;
    bool pass = false;
    std::vector<Fom> failing_foms;

    FomValues values() const { return {r_mag_db, sigma_mag_db, r_phs_deg}; }

    friend bool operator==(const FomReport&, const FomReport&) = default;
};

/// Compares values against limits; failing FoMs are listed in attribution order.
FomReport judge(const FomValues& values, const FomLimits& limits);

/// Magnitude in dB, 20 log10 |E|. Throws NumericalError for a zero sample.
double magnitude_db(const Complex& value);

/// Dynamic range (max - min) of the sample magnitudes in dB.
double r_mag(std::span<const Complex> values);
double r_mag(std::span<const FieldSample> samples);

/// Sample standard deviation (divisor N - 1) of the sample magnitudes in dB.
double sigma_mag(std::span<const Complex> values);
double sigma_mag(std::span<const FieldSample> samples);

/**
 * Wrap-aware spread of a set of phases, in degrees.
 *
 * The phases are placed on the circle, the largest empty arc between
 * neighbours is found, and the spread is 360 deg minus that arc, capped at
 * 180 deg. {359, 2} therefore spreads 3 deg, not 357 deg.
 */
double circular_phase_range_deg(std::span<const double> phases_deg);

/// Largest per-row phase spread. `values` must be aligned with mesh.points().
double r_phs(const TestZoneMesh& mesh, std::span<const Complex> values);
double r_phs(const TestZoneMesh& mesh, std::span<const FieldSample> samples);

FomValues compute_foms(const TestZoneMesh& mesh, std::span<const Complex> values);

/// Synthesizes the field over the zone mesh and scores it.
FomReport evaluate_fom(const ArrayLayout& layout, const WaveSpec& wave, const TestZoneSpec& spec,
                       const FomLimits& limits, unsigned threads = 0);

}  // namespace rlos
