#include "rlos/precoding.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "rlos/error.hpp"
#include "rlos/parallel.hpp"
#include "rlos/tolerance.hpp"

namespace rlos {

namespace {
constexpr double kDegToRad = std::numbers::pi / 180.0;
}

std::vector<Point2> DutArraySpec::element_positions() const {
    std::vector<Point2> positions;
    positions.reserve(n_elements);
    const double mid = static_cast<double>(n_elements - 1) / 2.0;
    for (std::size_t n = 0; n < n_elements; ++n)
        positions.push_back({(static_cast<double>(n) - mid) * ies_m, center_distance_m});
    return positions;
}

void DutArraySpec::validate(double tz_radius_m) const {
    detail::require(n_elements >= 2, "DUT needs at least two elements");
    detail::require(ies_m > 0.0, "DUT spacing must be positive");
    detail::require(center_distance_m > 0.0, "DUT distance must be positive");
    detail::require(static_cast<double>(n_elements - 1) * ies_m <= 2.0 * tz_radius_m * (1.0 + 1e-12),
                    "DUT span does not fit inside the test zone");
}

Pose InterfererPlacement::pose(double center_distance_m) const {
    const double a = alpha_deg * kDegToRad;
    return {{center_distance_m * std::sin(a), center_distance_m - center_distance_m * std::cos(a)}, a};
}

double alpha_min_deg(double length_m, double center_distance_m) {
    detail::require(length_m > 0.0 && center_distance_m > 0.0, "alpha_min needs positive L and D");
    return std::atan(length_m / center_distance_m) / kDegToRad;
}

Channel build_channel(const ArrayLayout& layout, const Pose& main_pose, const Pose& interferer_pose,
                      const DutArraySpec& dut, const WaveSpec& wave) {
    const auto receivers = dut.element_positions();
    const auto main = field_at_points(layout, wave, receivers, main_pose, 1);
    const auto interferer = field_at_points(layout, wave, receivers, interferer_pose, 1);

    Channel channel;
    channel.h.resize(2, static_cast<Eigen::Index>(receivers.size()));
    for (std::size_t n = 0; n < receivers.size(); ++n) {
        channel.h(0, static_cast<Eigen::Index>(n)) = main[n];
        channel.h(1, static_cast<Eigen::Index>(n)) = interferer[n];
    }
    channel.normalization = std::sqrt(channel.h.squaredNorm() / static_cast<double>(channel.h.size()));
    if (!(channel.normalization > 0.0)) throw NumericalError("channel has zero energy");
    channel.h /= channel.normalization;
    return channel;
}

Channel build_channel(const ArrayLayout& layout, const InterfererPlacement& placement,
                      const DutArraySpec& dut, const WaveSpec& wave) {
    return build_channel(layout, Pose{}, placement.pose(dut.center_distance_m), dut, wave);
}

std::string_view to_string(Precoder precoder) {
    return precoder == Precoder::mf ? "MF" : "ZF";
}

WeightMatrix mf_weights(const ChannelMatrix& h) {
    return h.adjoint();
}

WeightMatrix zf_weights(const ChannelMatrix& h) {
    const Eigen::Matrix2cd gram = h * h.adjoint();
    const Complex det = gram(0, 0) * gram(1, 1) - gram(0, 1) * gram(1, 0);
    const double half_trace = (gram(0, 0).real() + gram(1, 1).real()) / 2.0;
    if (std::abs(det) < 1e-12 * half_trace * half_trace)
        throw NumericalError("H H^H is near-singular: main and interferer channels are nearly collinear");
    Eigen::Matrix2cd inverse;
    inverse << gram(1, 1), -gram(0, 1), -gram(1, 0), gram(0, 0);
    inverse /= det;
    return h.adjoint() * inverse;
}

WeightMatrix combiner(Precoder precoder, const ChannelMatrix& h) {
    return precoder == Precoder::mf ? mf_weights(h) : zf_weights(h);
}

WeightMatrix perturb_weights(const WeightMatrix& w, double sigma_db, CounterRng& stream) {
    const auto errors = draw_errors({sigma_db}, static_cast<std::size_t>(w.size()), stream);
    WeightMatrix perturbed(w.rows(), 2);
    std::size_t e = 0;
    for (Eigen::Index u = 0; u < 2; ++u)
        for (Eigen::Index n = 0; n < w.rows(); ++n) perturbed(n, u) = (1.0 + errors[e++]) * w(n, u);
    return perturbed;
}

std::array<double, 2> sinr(const ChannelMatrix& h, const WeightMatrix& w, double snr_db) {
    detail::require(h.cols() == w.rows(), "channel and combiner shapes disagree");
    const double rho = std::pow(10.0, snr_db / 10.0);
    const Eigen::Matrix2cd g = h * w;
    std::array<double, 2> out{};
    for (Eigen::Index u = 0; u < 2; ++u) {
        const Eigen::Index v = 1 - u;
        const double noise = w.col(u).squaredNorm();
        if (!(noise > 0.0)) throw NumericalError("combiner column " + std::to_string(u) + " has zero norm");
        out[static_cast<std::size_t>(u)] = rho * std::norm(g(u, u)) / (rho * std::norm(g(v, u)) + noise);
    }
    return out;
}

double sum_rate(const std::array<double, 2>& sinr_pair) {
    detail::require(sinr_pair[0] >= 0.0 && sinr_pair[1] >= 0.0, "SINR must be non-negative");
    return std::log2(1.0 + sinr_pair[0]) + std::log2(1.0 + sinr_pair[1]);
}

StudyConfig StudyConfig::standard(const WaveSpec& wave) {
    StudyConfig cfg;
    for (int i = 0; i <= 20; ++i) cfg.sigma_dut_db.push_back(i / 10.0);
    cfg.dut_ies_m = wave.meters(0.5);
    cfg.tz_radius_m = wave.meters(99.0 / 8.0);
    return cfg;
}

void StudyConfig::validate() const {
    detail::require(!snr_db.empty(), "study needs at least one SNR");
    detail::require(!sigma_dut_db.empty(), "study needs at least one sigma_DUT");
    detail::require(!alpha_offsets_deg.empty(), "study needs at least one interferer angle");
    detail::require(!precoders.empty(), "study needs at least one precoder");
    detail::require(n_mc >= 1, "study n_mc must be >= 1");
    for (double s : sigma_dut_db) detail::require(s >= 0.0, "sigma_DUT values must be >= 0");
    for (double a : alpha_offsets_deg) detail::require(a >= 0.0, "interferer angle offsets must be >= 0");
    detail::require(tz_radius_m > 0.0, "test zone radius must be positive");
    DutArraySpec{dut_elements, dut_ies_m, 1.0}.validate(tz_radius_m);
}

const SumRateCell& SumRateSurface::find(std::size_t geometry, std::size_t alpha_index, Precoder precoder,
                                        double sigma_dut_db, double snr_db) const {
    for (const auto& c : cells)
        if (c.geometry == geometry && c.alpha_index == alpha_index && c.precoder == precoder &&
            std::abs(c.sigma_dut_db - sigma_dut_db) < 1e-9 && std::abs(c.snr_db - snr_db) < 1e-9)
            return c;
    throw ValidationError("no sum-rate cell at the requested coordinates");
}

SumRateSurface run_study(const LayoutConfig& layout, const WaveSpec& wave,
                         const std::vector<StudyGeometry>& geometries, const StudyConfig& cfg,
                         unsigned threads) {
    layout.validate();
    cfg.validate();
    detail::require(!geometries.empty(), "study needs at least one geometry");

    // Weights per (geometry, angle, precoder), from the unperturbed channel.
    struct Setup {
        std::size_t geometry;
        std::size_t alpha_index;
        double alpha_deg;
        double length_m;
        double d_m;
        Precoder precoder;
        ChannelMatrix h;
        WeightMatrix w;
    };
    std::vector<Setup> setups;
    for (std::size_t g = 0; g < geometries.size(); ++g) {
        const auto array = layout.make_layout(geometries[g].ies_m);
        const DutArraySpec dut{cfg.dut_elements, cfg.dut_ies_m, geometries[g].d_m};
        detail::require(geometries[g].d_m > cfg.tz_radius_m, "geometry D must exceed the test zone radius");
        const double base = alpha_min_deg(array.length_m(), geometries[g].d_m);
        for (std::size_t a = 0; a < cfg.alpha_offsets_deg.size(); ++a) {
            const double alpha = base + cfg.alpha_offsets_deg[a];
            const auto channel = build_channel(array, InterfererPlacement{alpha}, dut, wave);
            for (auto p : cfg.precoders)
                setups.push_back({g, a, alpha, array.length_m(), geometries[g].d_m, p, channel.h,
                                  combiner(p, channel.h)});
        }
    }

    const std::size_t n_sigma = cfg.sigma_dut_db.size();
    const std::size_t n_snr = cfg.snr_db.size();
    SumRateSurface surface;
    surface.n_mc = cfg.n_mc;
    surface.seed = cfg.seed;
    surface.cells.resize(setups.size() * n_sigma * n_snr);

    parallel_for(
        setups.size() * n_sigma,
        [&](std::size_t task) {
            const Setup& s = setups[task / n_sigma];
            const std::size_t sigma_index = task % n_sigma;
            const double sigma_db = cfg.sigma_dut_db[sigma_index];
            std::vector<double> totals(n_snr, 0.0);
            std::size_t iterations = cfg.n_mc;
            if (sigma_db == 0.0) {
                iterations = 1;
                for (std::size_t k = 0; k < n_snr; ++k) totals[k] = sum_rate(sinr(s.h, s.w, cfg.snr_db[k]));
            } else {
                for (std::size_t it = 0; it < iterations; ++it) {
                    CounterRng stream(cfg.seed, {s.geometry, s.alpha_index, static_cast<std::uint64_t>(s.precoder),
                                                 sigma_index, it});
                    const auto w = perturb_weights(s.w, sigma_db, stream);
                    for (std::size_t k = 0; k < n_snr; ++k) totals[k] += sum_rate(sinr(s.h, w, cfg.snr_db[k]));
                }
            }
            for (std::size_t k = 0; k < n_snr; ++k) {
                surface.cells[task * n_snr + k] = {s.geometry,   s.length_m,       s.d_m,
                                                   s.alpha_index, s.alpha_deg,     s.precoder,
                                                   cfg.snr_db[k], sigma_db,        totals[k] / static_cast<double>(iterations)};
            }
        },
        threads == 0 ? default_thread_count() : threads);
    return surface;
}

}  // namespace rlos
