#include "rlos/field.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "rlos/error.hpp"
#include "rlos/parallel.hpp"

namespace rlos {

WaveSpec::WaveSpec(double frequency_hz)
    : frequency_hz_(frequency_hz),
      wavelength_m_(kSpeedOfLight / frequency_hz),
      wavenumber_(2.0 * std::numbers::pi / wavelength_m_) {
    detail::require(std::isfinite(frequency_hz) && frequency_hz > 0.0, "frequency must be positive");
}

std::vector<double> make_taper(std::size_t n_elements, std::size_t n_edge, double depth_db,
                               TaperEndpoint endpoint) {
    detail::require(n_elements >= 1, "array needs at least one element");
    detail::require(2 * n_edge <= n_elements, "taper edge count " + std::to_string(n_edge) +
                                                  " exceeds half of " + std::to_string(n_elements) +
                                                  " elements");
    detail::require(std::isfinite(depth_db) && depth_db <= 0.0, "taper depth must be <= 0 dB");

    std::vector<double> taper(n_elements, 1.0);
    for (std::size_t m = 0; m < n_edge; ++m) {
        // m counts outward from the innermost tapered element
        double level_db = 0.0;
        if (endpoint == TaperEndpoint::inclusive)
            level_db = n_edge == 1 ? depth_db
                                   : depth_db * static_cast<double>(m) / static_cast<double>(n_edge - 1);
        else
            level_db = depth_db * static_cast<double>(m + 1) / static_cast<double>(n_edge);
        const double linear = std::pow(10.0, level_db / 20.0);
        const std::size_t outer = n_edge - 1 - m;
        taper[outer] = linear;
        taper[n_elements - 1 - outer] = linear;
    }
    return taper;
}

ArrayLayout::ArrayLayout(double ies_m, std::vector<double> taper, std::vector<Complex> excitation_errors)
    : ies_m_(ies_m), taper_(std::move(taper)), errors_(std::move(excitation_errors)) {
    detail::require(std::isfinite(ies_m) && ies_m > 0.0, "inter-element spacing must be positive");
    detail::require(!taper_.empty(), "array needs at least one element");
    detail::require(errors_.empty() || errors_.size() == taper_.size(),
                    "excitation error count must match element count");
    const double mid = static_cast<double>(taper_.size() - 1) / 2.0;
    positions_.reserve(taper_.size());
    for (std::size_t i = 0; i < taper_.size(); ++i)
        positions_.push_back((static_cast<double>(i) - mid) * ies_m_);
}

double ArrayLayout::length_m() const {
    return static_cast<double>(n_elements() - 1) * ies_m_;
}

Complex ArrayLayout::excitation(std::size_t i) const {
    if (errors_.empty()) return {taper_[i], 0.0};
    return (1.0 + errors_[i]) * taper_[i];
}

ArrayLayout ArrayLayout::with_errors(std::vector<Complex> errors) const {
    return ArrayLayout(ies_m_, taper_, std::move(errors));
}

Point2 ArrayLayout::element_position(std::size_t i, const Pose& pose) const {
    const double offset = positions_[i];
    return {pose.center.x + offset * std::cos(pose.axis_angle_rad),
            pose.center.y + offset * std::sin(pose.axis_angle_rad)};
}

namespace {

struct Sources {
    std::vector<Point2> positions;
    std::vector<Complex> excitations;
};

Sources collect_sources(const ArrayLayout& layout, const Pose& pose) {
    Sources s;
    s.positions.reserve(layout.n_elements());
    s.excitations.reserve(layout.n_elements());
    for (std::size_t i = 0; i < layout.n_elements(); ++i) {
        s.positions.push_back(layout.element_position(i, pose));
        s.excitations.push_back(layout.excitation(i));
    }
    return s;
}

Complex superpose(const Sources& sources, double k, const Point2& point) {
    Complex sum{};
    for (std::size_t i = 0; i < sources.positions.size(); ++i) {
        const double dx = point.x - sources.positions[i].x;
        const double dy = point.y - sources.positions[i].y;
        const double r = std::sqrt(dx * dx + dy * dy);
        if (r == 0.0) throw NumericalError("field evaluated on top of element " + std::to_string(i));
        sum += radiated_term(sources.excitations[i], k, r);
    }
    return sum;
}

}  // namespace

Complex field_at(const ArrayLayout& layout, const WaveSpec& wave, const Point2& point, const Pose& pose) {
    return superpose(collect_sources(layout, pose), wave.wavenumber(), point);
}

std::vector<Complex> field_at_points(const ArrayLayout& layout, const WaveSpec& wave,
                                     std::span<const Point2> points, const Pose& pose, unsigned threads) {
    const Sources sources = collect_sources(layout, pose);
    const double k = wave.wavenumber();
    std::vector<Complex> values(points.size());
    constexpr std::size_t kBlock = 256;
    const std::size_t blocks = (points.size() + kBlock - 1) / kBlock;
    parallel_for(
        blocks,
        [&](std::size_t b) {
            const std::size_t end = std::min(points.size(), (b + 1) * kBlock);
            for (std::size_t p = b * kBlock; p < end; ++p) values[p] = superpose(sources, k, points[p]);
        },
        threads == 0 ? default_thread_count() : threads);
    return values;
}

std::vector<FieldSample> field_over_mesh(const ArrayLayout& layout, const WaveSpec& wave,
                                         const TestZoneMesh& mesh, unsigned threads) {
    detail::require(mesh.size() > 0, "mesh must not be empty");
    const auto values = field_at_points(layout, wave, mesh.points(), {}, threads);
    std::vector<FieldSample> samples;
    samples.reserve(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) samples.push_back({mesh.points()[i], values[i]});
    return samples;
}

}  // namespace rlos
