#include "rlos/mesh.hpp"

#include <cmath>
#include <string>

#include "rlos/error.hpp"

namespace rlos {

TestZoneSpec TestZoneSpec::standard(double wavelength_m, double center_distance_m) {
    return {center_distance_m, 99.0 * wavelength_m / 8.0, wavelength_m / 8.0};
}

void TestZoneSpec::validate() const {
    detail::require(std::isfinite(radius_m) && radius_m > 0.0, "test zone radius must be positive");
    detail::require(std::isfinite(mesh_pitch_m) && mesh_pitch_m > 0.0,
                    "test zone mesh pitch must be positive");
    detail::require(std::isfinite(center_distance_m) && center_distance_m > radius_m,
                    "test zone distance D must exceed its radius R");
}

TestZoneMesh::TestZoneMesh(std::vector<Point2> points, std::vector<std::size_t> row_offsets)
    : points_(std::move(points)), row_offsets_(std::move(row_offsets)) {
    detail::require(!row_offsets_.empty() && row_offsets_.front() == 0 &&
                        row_offsets_.back() == points_.size(),
                    "row offsets must span the point list");
    for (std::size_t r = 0; r + 1 < row_offsets_.size(); ++r)
        detail::require(row_offsets_[r] < row_offsets_[r + 1], "mesh rows must be non-empty");
}

std::span<const Point2> TestZoneMesh::row(std::size_t r) const {
    return std::span<const Point2>(points_).subspan(row_offsets_[r],
                                                    row_offsets_[r + 1] - row_offsets_[r]);
}

TestZoneMesh build_mesh(const TestZoneSpec& spec) {
    spec.validate();
    // Work in lattice units so the disc test is exact for R = integer * pitch;
    // the relative slack absorbs rounding in R / pitch.
    const double reach = spec.radius_m / spec.mesh_pitch_m;
    const double reach_sq = reach * reach * (1.0 + 1e-12);
    const auto max_index = static_cast<long>(std::floor(reach * (1.0 + 1e-12)));
    if (max_index < 0 || reach < 0.5)
        throw ValidationError("test zone mesh would be empty (R < pitch/2)");

    std::vector<Point2> points;
    std::vector<std::size_t> offsets{0};
    for (long b = -max_index; b <= max_index; ++b) {
        const double y = spec.center_distance_m + static_cast<double>(b) * spec.mesh_pitch_m;
        const std::size_t before = points.size();
        for (long a = -max_index; a <= max_index; ++a) {
            const double d2 = static_cast<double>(a * a + b * b);
            if (d2 <= reach_sq) points.push_back({static_cast<double>(a) * spec.mesh_pitch_m, y});
        }
        if (points.size() > before) offsets.push_back(points.size());
    }
    if (points.empty()) throw ValidationError("test zone mesh would be empty (R < pitch/2)");
    return TestZoneMesh(std::move(points), std::move(offsets));
}

}  // namespace rlos
