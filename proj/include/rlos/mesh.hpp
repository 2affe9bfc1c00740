#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "rlos/geometry.hpp"

namespace rlos {

/// Circular test zone centered at (0, D).
struct TestZoneSpec {
    double center_distance_m = 0.0;
    double radius_m = 0.0;
    double mesh_pitch_m = 0.0;

    /// Zone of radius 99λ/8 sampled every λ/8.
    static TestZoneSpec standard(double wavelength_m, double center_distance_m);

    void validate() const;

    friend bool operator==(const TestZoneSpec&, const TestZoneSpec&) = default;
};

/**
 * Square-lattice samples inside the test-zone disc, grouped in rows of
 * constant y (stripes parallel to the chamber array).
 *
 * The lattice is anchored on the zone center, so (0, D) is always a node and
 * the sample set is mirror-symmetric about x = 0. Points on the boundary
 * circle are included. Points are stored row-major, x increasing within a
 * row and y increasing across rows.
 */
class TestZoneMesh {
public:
    TestZoneMesh(std::vector<Point2> points, std::vector<std::size_t> row_offsets);

    std::size_t size() const { return points_.size(); }
    std::size_t row_count() const { return row_offsets_.size() - 1; }

    std::span<const Point2> points() const { return points_; }
    std::span<const Point2> row(std::size_t r) const;

    /// Row boundaries: row r spans [offsets[r], offsets[r+1]).
    std::span<const std::size_t> row_offsets() const { return row_offsets_; }

private:
    std::vector<Point2> points_;
    std::vector<std::size_t> row_offsets_;
};

TestZoneMesh build_mesh(const TestZoneSpec& spec);

}  // namespace rlos
