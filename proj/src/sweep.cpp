#include "rlos/sweep.hpp"

#include <algorithm>
#include <limits>
#include <sstream>
#include <string>

#include "rlos/error.hpp"
#include "rlos/parallel.hpp"

namespace rlos {

void LayoutConfig::validate() const {
    detail::require(n_elements >= 2, "chamber array needs at least two elements");
    detail::require(2 * taper_edge <= n_elements, "taper_edge: 2 * " + std::to_string(taper_edge) +
                                                      " exceeds " + std::to_string(n_elements) +
                                                      " elements");
    detail::require(taper_depth_db <= 0.0, "taper_depth_db must be <= 0");
}

ArrayLayout LayoutConfig::make_layout(double ies_m) const {
    return ArrayLayout(ies_m, make_taper(n_elements, taper_edge, taper_depth_db, taper_endpoint));
}

SweepGrid SweepGrid::standard(const WaveSpec& wave, double d_step_lambda) {
    detail::require(d_step_lambda > 0.0, "D step must be positive");
    SweepGrid grid;
    for (int i = 0; i <= 20; ++i) grid.ies_m.push_back(wave.meters((50.0 + 5.0 * i) / 100.0));
    for (std::size_t j = 0;; ++j) {
        const double d_lambda = 40.0 + static_cast<double>(j) * d_step_lambda;
        if (d_lambda > 2450.0 + 1e-9) break;
        grid.d_m.push_back(wave.meters(d_lambda));
    }
    grid.tiers = {FomLimits::tier(1), FomLimits::tier(2), FomLimits::tier(3)};
    return grid;
}

double SweepGrid::max_distance_m(const LayoutConfig& layout, const WaveSpec& wave) const {
    detail::require(!ies_m.empty(), "sweep grid needs at least one IES value");
    const double shortest = static_cast<double>(layout.n_elements - 1) *
                            *std::min_element(ies_m.begin(), ies_m.end());
    return 2.0 * shortest * shortest / wave.wavelength_m() / 2.0;
}

void SweepGrid::validate(const LayoutConfig& layout, const WaveSpec& wave) const {
    detail::require(!ies_m.empty() && !d_m.empty(), "sweep grid must not be empty");
    detail::require(!tiers.empty(), "sweep grid needs at least one limit tier");
    detail::require(std::adjacent_find(ies_m.begin(), ies_m.end(), std::greater_equal<>()) == ies_m.end(),
                    "ies values must be strictly increasing");
    detail::require(std::adjacent_find(d_m.begin(), d_m.end(), std::greater_equal<>()) == d_m.end(),
                    "D values must be strictly increasing");
    detail::require(ies_m.front() > 0.0, "ies values must be positive");
    const double cap = max_distance_m(layout, wave);
    detail::require(d_m.back() <= cap * (1.0 + 1e-12),
                    "largest D exceeds half the Fraunhofer distance of the shortest array (" +
                        std::to_string(wave.lambdas(cap)) + " lambda)");
    for (const auto& t : tiers) t.validate();
}

ComplianceMap run_sweep(const SweepGrid& grid, const LayoutConfig& layout, const WaveSpec& wave,
                        double tz_radius_m, double mesh_pitch_m, unsigned threads) {
    layout.validate();
    grid.validate(layout, wave);
    TestZoneSpec{grid.d_m.front(), tz_radius_m, mesh_pitch_m}.validate();

    ComplianceMap map{grid.ies_m, grid.d_m, grid.tiers, {}};
    map.cells.resize(grid.ies_m.size() * grid.d_m.size());
    parallel_for(
        map.cells.size(),
        [&](std::size_t c) {
            const double ies = grid.ies_m[c / grid.d_m.size()];
            const double d = grid.d_m[c % grid.d_m.size()];
            try {
                const auto array = layout.make_layout(ies);
                const auto mesh = build_mesh({d, tz_radius_m, mesh_pitch_m});
                const auto values = field_at_points(array, wave, mesh.points(), {}, 1);
                ComplianceCell cell{ies, array.length_m(), d, compute_foms(mesh, values), {}};
                for (const auto& tier : grid.tiers) cell.reports.push_back(judge(cell.values, tier));
                map.cells[c] = std::move(cell);
            } catch (const std::exception& e) {
                std::ostringstream msg;
                msg << "sweep cell (ies=" << wave.lambdas(ies) << " lambda, D=" << wave.lambdas(d)
                    << " lambda) failed: " << e.what();
                throw NumericalError(msg.str());
            }
        },
        threads == 0 ? default_thread_count() : threads);
    return map;
}

std::vector<LengthDistance> pareto_frontier(std::span<const LengthDistance> points) {
    std::vector<LengthDistance> sorted(points.begin(), points.end());
    std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
        return a.length_m != b.length_m ? a.length_m < b.length_m : a.d_m < b.d_m;
    });
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());

    // Walking by increasing L, a point survives only if it is shorter in D
    // than everything before it.
    std::vector<LengthDistance> frontier;
    double best_d = std::numeric_limits<double>::infinity();
    for (const auto& p : sorted) {
        if (p.d_m < best_d) {
            frontier.push_back(p);
            best_d = p.d_m;
        }
    }
    return frontier;
}

std::vector<LengthDistance> compact_frontier(const ComplianceMap& map, std::size_t tier_index) {
    detail::require(tier_index < map.tiers.size(), "tier index out of range");
    std::vector<LengthDistance> compliant;
    for (const auto& cell : map.cells)
        if (cell.reports[tier_index].pass) compliant.push_back({cell.length_m, cell.d_m});
    return pareto_frontier(compliant);
}

}  // namespace rlos
