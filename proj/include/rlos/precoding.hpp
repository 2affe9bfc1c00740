#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "rlos/field.hpp"
#include "rlos/rng.hpp"
#include "rlos/sweep.hpp"

namespace rlos {

/// 2 x N gains: row 0 main array -> DUT, row 1 interferer array -> DUT.
using ChannelMatrix = Eigen::Matrix<Complex, 2, Eigen::Dynamic>;
/// N x 2 combiner, one column per user.
using WeightMatrix = Eigen::Matrix<Complex, Eigen::Dynamic, 2>;

/// Linear receive array centered in the test zone, parallel to the chamber array.
struct DutArraySpec {
    std::size_t n_elements = 49;
    double ies_m = 0.0;
    double center_distance_m = 0.0;

    std::vector<Point2> element_positions() const;
    /// Requires n >= 2 and a span that fits inside a zone of radius tz_radius_m.
    void validate(double tz_radius_m) const;
};

/**
 * Interferer array placement. The interferer is a copy of the main array
 * whose center sits at distance D from the test-zone center, rotated by
 * alpha from boresight, and oriented broadside to the test-zone center.
 * alpha = 0 coincides with the main array.
 */
struct InterfererPlacement {
    double alpha_deg = 0.0;

    Pose pose(double center_distance_m) const;
};

/// Smallest interferer angle, arctan(L / D), reached when two arrays of length L abut.
double alpha_min_deg(double length_m, double center_distance_m);

struct Channel {
    ChannelMatrix h;
    /// The raw gains were divided by this to give unit mean-square entries.
    double normalization = 1.0;
};

/// Channel from two arbitrarily posed copies of `layout` to the DUT.
Channel build_channel(const ArrayLayout& layout, const Pose& main_pose, const Pose& interferer_pose,
                      const DutArraySpec& dut, const WaveSpec& wave);

/// Main array at the origin, interferer per `placement`.
Channel build_channel(const ArrayLayout& layout, const InterfererPlacement& placement,
                      const DutArraySpec& dut, const WaveSpec& wave);

enum class Precoder { mf, zf };

std::string_view to_string(Precoder precoder);

/// Matched filter: H^H.
WeightMatrix mf_weights(const ChannelMatrix& h);

/// Zero forcing: H^H (H H^H)^{-1}, with the 2 x 2 inverse taken in closed form.
/// Throws NumericalError when |det| < 1e-12 (trace / 2)^2.
WeightMatrix zf_weights(const ChannelMatrix& h);

WeightMatrix combiner(Precoder precoder, const ChannelMatrix& h);

/// W'[n,u] = (1 + eps[n,u]) W[n,u]. Draws are taken column by column
/// (user 0 first), one complex draw per entry.
WeightMatrix perturb_weights(const WeightMatrix& w, double sigma_db, CounterRng& stream);

/**
 * Uplink SINR per user for combiner W' at per-element SNR rho (unit noise
 * per DUT element, per-user transmit power rho):
 * SINR_u = rho |G[u,u]|^2 / (rho |G[v,u]|^2 + ||w'_u||^2), G = H W'.
 */
std::array<double, 2> sinr(const ChannelMatrix& h, const WeightMatrix& w, double snr_db);

double sum_rate(const std::array<double, 2>& sinr_pair);

struct StudyGeometry {
    double ies_m = 0.0;
    double d_m = 0.0;
};

struct StudyConfig {
    std::vector<double> snr_db{-10.0, 0.0, 10.0, 20.0};
    /// sigma_DUT grid in dB; standard() fills 0..2 step 0.1.
    std::vector<double> sigma_dut_db;
    /// Interferer angles as offsets from alpha_min.
    std::vector<double> alpha_offsets_deg{0.0, 15.0};
    std::vector<Precoder> precoders{Precoder::mf, Precoder::zf};
    std::size_t n_mc = 1000;
    std::uint64_t seed = 1;
    std::size_t dut_elements = 49;
    double dut_ies_m = 0.0;
    double tz_radius_m = 0.0;

    static StudyConfig standard(const WaveSpec& wave);
    void validate() const;
};

struct SumRateCell {
    std::size_t geometry = 0;
    double length_m = 0.0;
    double d_m = 0.0;
    std::size_t alpha_index = 0;
    double alpha_deg = 0.0;
    Precoder precoder = Precoder::mf;
    double snr_db = 0.0;
    double sigma_dut_db = 0.0;
    double avg_sum_rate = 0.0;
};

/// Averaged sum rates ordered geometry, alpha, precoder, sigma, snr (slowest to fastest).
struct SumRateSurface {
    std::vector<SumRateCell> cells;
    std::size_t n_mc = 0;
    std::uint64_t seed = 0;

    /// First cell matching the given coordinates; throws if absent.
    const SumRateCell& find(std::size_t geometry, std::size_t alpha_index, Precoder precoder,
                            double sigma_dut_db, double snr_db) const;
};

/**
 * Sum-rate study. W is computed once per (geometry, angle, precoder) from the
 * unperturbed channel; each Monte-Carlo iteration perturbs it with a draw
 * keyed by (seed, geometry, angle, precoder, sigma index, iteration), and the
 * same perturbation is scored at every SNR. sigma = 0 is evaluated once.
 */
SumRateSurface run_study(const LayoutConfig& layout, const WaveSpec& wave,
                         const std::vector<StudyGeometry>& geometries, const StudyConfig& cfg,
                         unsigned threads = 0);

}  // namespace rlos
