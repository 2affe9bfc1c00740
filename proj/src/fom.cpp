#include "rlos/fom.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "rlos/error.hpp"

namespace rlos {

std::string_view to_string(Fom fom) {
    switch (fom) {
        case Fom::r_mag: return "R_mag";
        case Fom::sigma_mag: return "sigma_mag";
        case Fom::r_phs: return "R_phs";
    }
    return "?";
}

FomLimits FomLimits::tier(int index) {
    switch (index) {
        case 1: return {0.25, 1.0, 10.0};
        case 2: return {0.225, 0.9, 9.0};
        case 3: return {0.2, 0.8, 8.0};
        default: throw ValidationError("limit tier must be 1, 2 or 3, got " + std::to_string(index));
    }
}

FomLimits FomLimits::unlimited() {
    constexpr double inf = std::numeric_limits<double>::infinity();
    return {inf, inf, inf};
}

void FomLimits::validate() const {
    detail::require(sigma_mag_max_db > 0.0, "sigma_mag limit must be positive");
    detail::require(r_mag_max_db > 0.0, "R_mag limit must be positive");
    detail::require(r_phs_max_deg > 0.0, "R_phs limit must be positive");
}

FomReport judge(const FomValues& values, const FomLimits& limits) {
    FomReport report{values.r_mag_db, values.sigma_mag_db, values.r_phs_deg, true, {}};
    if (values.r_mag_db > limits.r_mag_max_db) report.failing_foms.push_back(Fom::r_mag);
    if (values.sigma_mag_db > limits.sigma_mag_max_db) report.failing_foms.push_back(Fom::sigma_mag);
    if (values.r_phs_deg > limits.r_phs_max_deg) report.failing_foms.push_back(Fom::r_phs);
    report.pass = report.failing_foms.empty();
    return report;
}

double magnitude_db(const Complex& value) {
    const double power = std::norm(value);
    if (!(power > 0.0)) throw NumericalError("zero-magnitude field sample has no dB value");
    return 10.0 * std::log10(power);
}

namespace {

std::vector<Complex> values_of(std::span<const FieldSample> samples) {
    std::vector<Complex> v;
    v.reserve(samples.size());
    for (const auto& s : samples) v.push_back(s.value);
    return v;
}

double phase_deg(const Complex& value) {
    double deg = std::atan2(value.imag(), value.real()) * (180.0 / std::numbers::pi);
    if (deg < 0.0) deg += 360.0;
    return deg >= 360.0 ? 0.0 : deg;
}

struct MagnitudeStats {
    double min_db;
    double max_db;
    double std_db;
};

MagnitudeStats magnitude_stats(std::span<const Complex> values, bool need_std) {
    detail::require(!values.empty(), "need at least one field sample");
    std::vector<double> db(values.size());
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    double sum = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        db[i] = magnitude_db(values[i]);
        lo = std::min(lo, db[i]);
        hi = std::max(hi, db[i]);
        sum += db[i];
    }
    double stddev = 0.0;
    if (need_std) {
        const double mean = sum / static_cast<double>(db.size());
        double ss = 0.0;
        for (double x : db) ss += (x - mean) * (x - mean);
        stddev = std::sqrt(ss / static_cast<double>(db.size() - 1));
    }
    return {lo, hi, stddev};
}

}  // namespace

double r_mag(std::span<const Complex> values) {
    const auto stats = magnitude_stats(values, false);
    return stats.max_db - stats.min_db;
}

double r_mag(std::span<const FieldSample> samples) {
    return r_mag(values_of(samples));
}

double sigma_mag(std::span<const Complex> values) {
    detail::require(values.size() >= 2, "sigma_mag needs at least two samples");
    return magnitude_stats(values, true).std_db;
}

double sigma_mag(std::span<const FieldSample> samples) {
    return sigma_mag(values_of(samples));
}

double circular_phase_range_deg(std::span<const double> phases_deg) {
    detail::require(!phases_deg.empty(), "phase range of an empty row");
    std::vector<double> p;
    p.reserve(phases_deg.size());
    for (double deg : phases_deg) {
        double wrapped = std::fmod(deg, 360.0);
        if (wrapped < 0.0) wrapped += 360.0;
        p.push_back(wrapped >= 360.0 ? 0.0 : wrapped);
    }
    std::sort(p.begin(), p.end());
    double largest_gap = p.front() + 360.0 - p.back();
    for (std::size_t i = 1; i < p.size(); ++i) largest_gap = std::max(largest_gap, p[i] - p[i - 1]);
    return std::clamp(360.0 - largest_gap, 0.0, 180.0);
}

namespace {

// Spread of one row. Phases are first taken relative to the row's first sample;
// if they fit in less than half a turn that span is the circular range, else
// fall back to the sorted-gap computation.
double row_phase_spread(std::span<const Complex> row, std::vector<double>& scratch) {
    constexpr double to_deg = 180.0 / std::numbers::pi;
    const double ref_re = row.front().real();
    const double ref_im = -row.front().imag();
    double lo = 0.0;
    double hi = 0.0;
    for (const Complex& v : row) {
        const double re = v.real() * ref_re - v.imag() * ref_im;
        const double im = v.real() * ref_im + v.imag() * ref_re;
        const double rel = std::atan2(im, re) * to_deg;
        lo = std::min(lo, rel);
        hi = std::max(hi, rel);
    }
    if (hi - lo < 180.0) return hi - lo;
    scratch.clear();
    for (const Complex& v : row) scratch.push_back(phase_deg(v));
    return circular_phase_range_deg(scratch);
}

}  // namespace

double r_phs(const TestZoneMesh& mesh, std::span<const Complex> values) {
    detail::require(values.size() == mesh.size(), "samples are not aligned with the mesh");
    double worst = 0.0;
    std::vector<double> scratch;
    const auto offsets = mesh.row_offsets();
    for (std::size_t r = 0; r + 1 < offsets.size(); ++r)
        worst = std::max(worst, row_phase_spread(values.subspan(offsets[r], offsets[r + 1] - offsets[r]), scratch));
    return worst;
}

double r_phs(const TestZoneMesh& mesh, std::span<const FieldSample> samples) {
    return r_phs(mesh, values_of(samples));
}

FomValues compute_foms(const TestZoneMesh& mesh, std::span<const Complex> values) {
    detail::require(values.size() >= 2, "figures of merit need at least two samples");
    const auto stats = magnitude_stats(values, true);
    return {stats.max_db - stats.min_db, stats.std_db, r_phs(mesh, values)};
}

FomReport evaluate_fom(const ArrayLayout& layout, const WaveSpec& wave, const TestZoneSpec& spec,
                       const FomLimits& limits, unsigned threads) {
    limits.validate();
    const auto mesh = build_mesh(spec);
    const auto values = field_at_points(layout, wave, mesh.points(), {}, threads);
    return judge(compute_foms(mesh, values), limits);
}

}  // namespace rlos
