#include <doctest.h>

#include <cmath>
#include <random>

#include "oracle.hpp"
#include "rlos/error.hpp"
#include "rlos/precoding.hpp"

using namespace rlos;

namespace {

const WaveSpec kWave;

ChannelMatrix random_channel(std::mt19937_64& gen, Eigen::Index n) {
    std::normal_distribution<double> n01;
    ChannelMatrix h(2, n);
    for (Eigen::Index r = 0; r < 2; ++r)
        for (Eigen::Index c = 0; c < n; ++c) h(r, c) = Complex(n01(gen), n01(gen));
    return h;
}

/// W = H^H (H H^H)^{-1} in long double, via the normal equations (H H^H) X = H, W = X^H.
Eigen::Matrix<std::complex<long double>, Eigen::Dynamic, 2> zf_oracle(const ChannelMatrix& h) {
    using M = Eigen::Matrix<std::complex<long double>, Eigen::Dynamic, Eigen::Dynamic>;
    const M hl = h.cast<std::complex<long double>>();
    const M gram = hl * hl.adjoint();
    const M x = gram.fullPivLu().solve(hl);
    return x.adjoint();
}

DutArraySpec dut_at(double d_lambda) {
    return {49, kWave.meters(0.5), kWave.meters(d_lambda)};
}

/// Simulates y = sum_v sqrt(rho) h_v s_v + n and combines with column u of W.
double simulated_sinr(const ChannelMatrix& h, const WeightMatrix& w, double snr_db, int u, std::size_t symbols) {
    std::mt19937_64 gen(77 + u);
    std::normal_distribution<double> n01;
    const double amp = std::sqrt(std::pow(10.0, snr_db / 10.0));
    const double half = std::sqrt(0.5);
    const auto n = h.cols();
    oracle::Kahan cross_re, cross_im, s_pow;
    std::vector<Complex> shat(symbols), sym(symbols);
    for (std::size_t t = 0; t < symbols; ++t) {
        const Complex s0(half * n01(gen), half * n01(gen));
        const Complex s1(half * n01(gen), half * n01(gen));
        Complex out{};
        for (Eigen::Index k = 0; k < n; ++k) {
            const Complex y = amp * (h(0, k) * s0 + h(1, k) * s1) + Complex(half * n01(gen), half * n01(gen));
            out += w(k, u) * y;
        }
        shat[t] = out;
        sym[t] = u == 0 ? s0 : s1;
        const Complex c = out * std::conj(sym[t]);
        cross_re.add(c.real());
        cross_im.add(c.imag());
        s_pow.add(std::norm(sym[t]));
    }
    const Complex gain(static_cast<double>(cross_re.sum / s_pow.sum), static_cast<double>(cross_im.sum / s_pow.sum));
    oracle::Kahan residual;
    for (std::size_t t = 0; t < symbols; ++t) residual.add(std::norm(shat[t] - gain * sym[t]));
    return std::norm(gain) * static_cast<double>(s_pow.sum / residual.sum);
}

}  // namespace

TEST_CASE("alpha_min examples") {
    CHECK(alpha_min_deg(3.0, 3.0) == doctest::Approx(45.0));
    CHECK(alpha_min_deg(kWave.meters(133.65), kWave.meters(286.0)) == doctest::Approx(25.05).epsilon(1e-3));
    CHECK(alpha_min_deg(kWave.meters(69.3), kWave.meters(591.0)) == doctest::Approx(6.69).epsilon(1e-3));
    CHECK_THROWS_AS(alpha_min_deg(0.0, 1.0), ValidationError);
}

TEST_CASE("interferer pose sits on the circle of radius D around the zone center") {
    const double d = kWave.meters(286.0);
    for (double a : {0.0, 10.0, 25.05, 40.0}) {
        const Pose p = InterfererPlacement{a}.pose(d);
        CHECK(std::hypot(p.center.x, p.center.y - d) == doctest::Approx(d));
        CHECK(p.axis_angle_rad == doctest::Approx(a * std::numbers::pi / 180.0));
    }
    CHECK(InterfererPlacement{0.0}.pose(d) == Pose{});
}

TEST_CASE("identity channel") {
    ChannelMatrix h(2, 2);
    h << 1, 0, 0, 1;
    CHECK(mf_weights(h).isApprox(Eigen::Matrix2cd::Identity()));
    CHECK(zf_weights(h).isApprox(Eigen::Matrix2cd::Identity()));
}

TEST_CASE("zero forcing inverts the channel and matches the normal-equations oracle") {
    std::mt19937_64 gen(17);
    for (Eigen::Index n : {2, 4, 49}) {
        for (int trial = 0; trial < 100; ++trial) {
            const auto h = random_channel(gen, n);
            const auto w = zf_weights(h);
            const Eigen::Matrix2cd g = h * w;
            CHECK((g - Eigen::Matrix2cd::Identity()).cwiseAbs().maxCoeff() < 1e-10);
            const auto ref = zf_oracle(h);
            double worst = 0.0;
            for (Eigen::Index r = 0; r < n; ++r)
                for (Eigen::Index c = 0; c < 2; ++c) {
                    const std::complex<long double> d = std::complex<long double>(w(r, c)) - ref(r, c);
                    worst = std::max(worst, static_cast<double>(std::abs(d) / std::abs(ref(r, c))));
                }
            CHECK(worst < 1e-9);
        }
    }
}

TEST_CASE("collinear channel rows are rejected by zero forcing") {
    ChannelMatrix h(2, 3);
    h << Complex(1, 1), 2, 3, Complex(2, 2), 4, 6;
    CHECK_THROWS_AS(zf_weights(h), NumericalError);
}

TEST_CASE("weight perturbation") {
    std::mt19937_64 gen(1);
    const WeightMatrix w = random_channel(gen, 49).adjoint();
    CounterRng s0(1, {2});
    CHECK(perturb_weights(w, 0.0, s0) == w);
    CounterRng a(4, {1, 2}), b(4, {1, 2});
    CHECK(perturb_weights(w, 1.0, a) == perturb_weights(w, 1.0, b));

    WeightMatrix big = WeightMatrix::Constant(500'000, 2, Complex(0.3, -0.7));
    CounterRng stream(3, {9});
    const WeightMatrix p = perturb_weights(big, 2.0, stream);
    std::vector<Complex> ratio;
    for (Eigen::Index r = 0; r < p.rows(); ++r)
        for (Eigen::Index c = 0; c < 2; ++c) ratio.push_back(p(r, c) / big(r, c) - 1.0);
    oracle::Kahan re, im;
    for (auto z : ratio) {
        re.add(static_cast<long double>(z.real()) * z.real());
        im.add(static_cast<long double>(z.imag()) * z.imag());
    }
    const double expected = 0.258925;
    CHECK(std::sqrt(static_cast<double>(re.sum) / ratio.size()) == doctest::Approx(expected).epsilon(0.01));
    CHECK(std::sqrt(static_cast<double>(im.sum) / ratio.size()) == doctest::Approx(expected).epsilon(0.01));
}

TEST_CASE("sum rate examples") {
    CHECK(sum_rate({0.0, 0.0}) == 0.0);
    CHECK(sum_rate({1.0, 1.0}) == doctest::Approx(2.0));
    CHECK(sum_rate({10.0, 10.0}) == doctest::Approx(6.9189).epsilon(1e-5));
    CHECK_THROWS_AS(sum_rate({-1.0, 0.0}), ValidationError);
}

TEST_CASE("SINR matches a symbol-level simulation") {
    std::mt19937_64 gen(23);
    const ChannelMatrix h = random_channel(gen, 8) * 0.5;
    CounterRng stream(2, {1});
    const auto w = perturb_weights(mf_weights(h), 1.5, stream);
    for (double snr : {-3.0, 6.0}) {
        const auto s = sinr(h, w, snr);
        for (int u = 0; u < 2; ++u)
            CHECK(simulated_sinr(h, w, snr, u, 1'000'000) == doctest::Approx(s[static_cast<std::size_t>(u)]).epsilon(0.02));
    }
}

TEST_CASE("SINR properties") {
    std::mt19937_64 gen(29);
    const auto h = random_channel(gen, 49);
    const auto w = mf_weights(h);
    const auto base = sinr(h, w, 10.0);

    WeightMatrix scaled = w;
    scaled.col(0) *= Complex(-2.0, 0.5);
    scaled.col(1) *= Complex(0.0, 3.0);
    const auto s = sinr(h, scaled, 10.0);
    CHECK(s[0] == doctest::Approx(base[0]).epsilon(1e-12));
    CHECK(s[1] == doctest::Approx(base[1]).epsilon(1e-12));

    // Matched filter saturates at the signal-to-interference ratio.
    const Eigen::Matrix2cd g = h * w;
    const auto high = sinr(h, w, 60.0);
    CHECK(high[0] == doctest::Approx(std::norm(g(0, 0)) / std::norm(g(1, 0))).epsilon(1e-3));
    CHECK(high[1] == doctest::Approx(std::norm(g(1, 1)) / std::norm(g(0, 1))).epsilon(1e-3));

    // Zero forcing has no interference term: SINR = rho / ||w_u||^2.
    const auto wz = zf_weights(h);
    const Eigen::Matrix2cd gz = h * wz;
    CHECK(std::abs(gz(0, 1)) < 1e-10);
    CHECK(std::abs(gz(1, 0)) < 1e-10);
    const auto z = sinr(h, wz, 20.0);
    CHECK(z[0] == doctest::Approx(100.0 / wz.col(0).squaredNorm()).epsilon(1e-12));
}

TEST_CASE("channel construction") {
    const auto layout = LayoutConfig{}.make_layout(kWave.meters(1.35));
    const double d = kWave.meters(286.0);
    const auto dut = dut_at(286.0);
    CHECK_NOTHROW(dut.validate(kWave.meters(99.0 / 8.0)));
    CHECK_THROWS_AS((DutArraySpec{60, kWave.meters(0.5), d}.validate(kWave.meters(99.0 / 8.0))), ValidationError);

    const double alpha = alpha_min_deg(layout.length_m(), d);
    const auto ch = build_channel(layout, InterfererPlacement{alpha}, dut, kWave);
    CHECK(ch.h.cwiseAbs2().mean() == doctest::Approx(1.0).epsilon(1e-12));

    // Extended-precision fixture for the same geometry.
    std::vector<long double> amps(layout.taper().begin(), layout.taper().end());
    const auto main = oracle::array_sources(100, layout.ies_m(), amps);
    const Pose ip = InterfererPlacement{alpha}.pose(d);
    const auto inter =
        oracle::array_sources(100, layout.ies_m(), amps, {}, ip.center.x, ip.center.y, ip.axis_angle_rad);
    std::vector<oracle::cld> raw;
    long double energy = 0.0L;
    for (const auto* src : {&main, &inter})
        for (const auto& p : dut.element_positions()) {
            raw.push_back(oracle::field(*src, 28e9L, p.x, p.y));
            energy += std::norm(raw.back());
        }
    const long double norm = std::sqrt(energy / raw.size());
    CHECK(ch.normalization == doctest::Approx(static_cast<double>(norm)).epsilon(1e-11));
    double worst = 0.0;
    for (Eigen::Index r = 0; r < 2; ++r)
        for (Eigen::Index c = 0; c < 49; ++c) {
            const auto ref = raw[static_cast<std::size_t>(r * 49 + c)] / norm;
            worst = std::max(worst, static_cast<double>(std::abs(std::complex<long double>(ch.h(r, c)) - ref) /
                                                        std::abs(ref)));
        }
    CHECK(worst < 1e-10);
}

TEST_CASE("mirror placement gives mirrored channel magnitudes") {
    const auto layout = LayoutConfig{}.make_layout(kWave.meters(1.0));
    const double d = kWave.meters(469.0);
    const auto dut = dut_at(469.0);
    const auto ch = build_channel(layout, InterfererPlacement{-12.0}.pose(d), InterfererPlacement{12.0}.pose(d), dut, kWave);
    for (Eigen::Index n = 0; n < 49; ++n)
        CHECK(std::abs(ch.h(1, n)) == doctest::Approx(std::abs(ch.h(0, 48 - n))).epsilon(1e-10));
}

TEST_CASE("study surface properties") {
    const WaveSpec wave;
    StudyConfig cfg = StudyConfig::standard(wave);
    const std::vector<StudyGeometry> geometry{{wave.meters(1.35), wave.meters(286.0)}};

    StudyConfig zero = cfg;
    zero.sigma_dut_db = {0.0};
    const auto s1 = run_study(LayoutConfig{}, wave, geometry, zero);
    zero.seed = 99;
    const auto s2 = run_study(LayoutConfig{}, wave, geometry, zero);
    REQUIRE(s1.cells.size() == 2 * 2 * 4);
    for (std::size_t i = 0; i < s1.cells.size(); ++i) CHECK(s1.cells[i].avg_sum_rate == s2.cells[i].avg_sum_rate);

    // sigma = 0 equals the deterministic closed form.
    const auto layout = LayoutConfig{}.make_layout(wave.meters(1.35));
    const double alpha = alpha_min_deg(layout.length_m(), wave.meters(286.0));
    const auto h = build_channel(layout, InterfererPlacement{alpha}, dut_at(286.0), wave).h;
    const auto wz = zf_weights(h);
    for (double snr : cfg.snr_db) {
        const double rho = std::pow(10.0, snr / 10.0);
        const double closed = std::log2(1 + rho / wz.col(0).squaredNorm()) + std::log2(1 + rho / wz.col(1).squaredNorm());
        CHECK(s1.find(0, 0, Precoder::zf, 0.0, snr).avg_sum_rate == doctest::Approx(closed).epsilon(1e-12));
        CHECK(s1.find(0, 0, Precoder::mf, 0.0, snr).avg_sum_rate ==
              doctest::Approx(sum_rate(sinr(h, mf_weights(h), snr))).epsilon(1e-12));
    }

    // Average sum rate does not increase with sigma_DUT.
    const auto full = run_study(LayoutConfig{}, wave, geometry, cfg);
    CHECK(full.cells.size() == 2 * 2 * 21 * 4);
    for (std::size_t a = 0; a < 2; ++a)
        for (auto p : {Precoder::mf, Precoder::zf})
            for (double snr : cfg.snr_db)
                for (std::size_t i = 1; i < cfg.sigma_dut_db.size(); ++i) {
                    const double prev = full.find(0, a, p, cfg.sigma_dut_db[i - 1], snr).avg_sum_rate;
                    const double cur = full.find(0, a, p, cfg.sigma_dut_db[i], snr).avg_sum_rate;
                    CHECK(cur <= prev * 1.01);
                }

    const auto threaded = run_study(LayoutConfig{}, wave, geometry, cfg, 3);
    for (std::size_t i = 0; i < full.cells.size(); ++i) CHECK(threaded.cells[i].avg_sum_rate == full.cells[i].avg_sum_rate);
    CHECK_THROWS_AS(full.find(0, 5, Precoder::mf, 0.0, -10.0), ValidationError);
}
