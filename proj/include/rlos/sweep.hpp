#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "rlos/field.hpp"
#include "rlos/fom.hpp"

namespace rlos {

/// Element count and edge taper shared by every chamber array in a study.
struct LayoutConfig {
    std::size_t n_elements = 100;
    std::size_t taper_edge = 25;
    double taper_depth_db = -6.0;
    TaperEndpoint taper_endpoint = TaperEndpoint::exclusive;

    void validate() const;
    ArrayLayout make_layout(double ies_m) const;

    friend bool operator==(const LayoutConfig&, const LayoutConfig&) = default;
};

struct SweepGrid {
    std::vector<double> ies_m;
    std::vector<double> d_m;
    std::vector<FomLimits> tiers;

    /// IES 0.5..1.5 lambda step 0.05, D 40..2450 lambda step d_step, tiers 1-3.
    static SweepGrid standard(const WaveSpec& wave, double d_step_lambda = 1.0);

    /// Largest admissible D: half the Fraunhofer distance 2 L^2 / lambda of
    /// the shortest array in the grid.
    double max_distance_m(const LayoutConfig& layout, const WaveSpec& wave) const;

    void validate(const LayoutConfig& layout, const WaveSpec& wave) const;
};

struct ComplianceCell {
    double ies_m = 0.0;
    double length_m = 0.0;
    double d_m = 0.0;
    FomValues values;
    /// One report per grid tier, in grid order.
    std::vector<FomReport> reports;
};

/// Cells are ordered IES-major: cell(i, j) has ies_m[i] and d_m[j].
struct ComplianceMap {
    std::vector<double> ies_m;
    std::vector<double> d_m;
    std::vector<FomLimits> tiers;
    std::vector<ComplianceCell> cells;

    const ComplianceCell& cell(std::size_t ies_index, std::size_t d_index) const {
        return cells[ies_index * d_m.size() + d_index];
    }
};

ComplianceMap run_sweep(const SweepGrid& grid, const LayoutConfig& layout, const WaveSpec& wave,
                        double tz_radius_m, double mesh_pitch_m, unsigned threads = 0);

struct LengthDistance {
    double length_m = 0.0;
    double d_m = 0.0;

    friend bool operator==(const LengthDistance&, const LengthDistance&) = default;
};

/// Pareto-minimal points under componentwise (L, D) order, sorted by L.
std::vector<LengthDistance> pareto_frontier(std::span<const LengthDistance> points);

/// Most compact compliant setups for one tier of the map.
std::vector<LengthDistance> compact_frontier(const ComplianceMap& map, std::size_t tier_index);

}  // namespace rlos
