#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracle.hpp"
#include "rlos/error.hpp"
#include "rlos/field.hpp"
#include "rlos/fom.hpp"
#include "rlos/sweep.hpp"

using namespace rlos;

namespace {

const WaveSpec kWave;

double rel_err(Complex a, oracle::cld b) {
    const Complex bd(static_cast<double>(b.real()), static_cast<double>(b.imag()));
    return std::abs(a - bd) / std::abs(bd);
}

std::vector<oracle::Source> oracle_sources(const ArrayLayout& layout, const oracle::Source& shift = {0, 0, 0}) {
    std::vector<long double> amps(layout.taper().begin(), layout.taper().end());
    std::vector<oracle::cld> errors;
    for (auto e : layout.excitation_errors()) errors.emplace_back(e.real(), e.imag());
    return oracle::array_sources(layout.n_elements(), layout.ies_m(), amps, errors, shift.x, shift.y);
}

}  // namespace

TEST_CASE("wavelength at 28 GHz") {
    CHECK(kWave.wavelength_m() == doctest::Approx(0.010706873).epsilon(1e-8));
    CHECK(kWave.meters(99.0 / 8.0) == doctest::Approx(0.13250).epsilon(1e-4));
    CHECK_THROWS_AS(WaveSpec(0.0), ValidationError);
}

TEST_CASE("make_taper inclusive endpoints") {
    const auto t = make_taper(100, 25, -6.0, TaperEndpoint::inclusive);
    REQUIRE(t.size() == 100);
    CHECK(t[0] == doctest::Approx(0.501187).epsilon(1e-6));
    CHECK(t[99] == doctest::Approx(0.501187).epsilon(1e-6));
    CHECK(t[24] == 1.0);
    for (int i = 25; i < 75; ++i) CHECK(t[i] == 1.0);
    const auto ref = oracle::taper(100, 25, -6.0L, false);
    for (int i = 0; i < 100; ++i) CHECK(t[i] == doctest::Approx(static_cast<double>(ref[i])).epsilon(1e-15));

    const auto small = make_taper(4, 2, -6.0, TaperEndpoint::inclusive);
    CHECK(small[0] == doctest::Approx(0.501187).epsilon(1e-6));
    CHECK(small[1] == 1.0);
    CHECK(small[2] == 1.0);
    CHECK(small[3] == doctest::Approx(0.501187).epsilon(1e-6));
}

TEST_CASE("make_taper exclusive endpoints") {
    const auto t = make_taper(100, 25, -6.0, TaperEndpoint::exclusive);
    CHECK(t[0] == doctest::Approx(0.501187).epsilon(1e-6));
    CHECK(t[24] == doctest::Approx(std::pow(10.0, -0.24 / 20.0)).epsilon(1e-15));
    CHECK(t[25] == 1.0);
    const auto ref = oracle::taper(100, 25, -6.0L, true);
    for (int i = 0; i < 100; ++i) CHECK(t[i] == doctest::Approx(static_cast<double>(ref[i])).epsilon(1e-15));
}

TEST_CASE("make_taper degenerate and invalid") {
    for (auto ep : {TaperEndpoint::inclusive, TaperEndpoint::exclusive})
        for (double v : make_taper(100, 0, -6.0, ep)) CHECK(v == 1.0);
    CHECK_THROWS_AS(make_taper(100, 60, -6.0, TaperEndpoint::inclusive), ValidationError);
    CHECK_THROWS_AS(make_taper(100, 25, 3.0, TaperEndpoint::inclusive), ValidationError);
}

TEST_CASE("single element is a spherical wave") {
    const ArrayLayout one(kWave.meters(1.0), {1.0});
    const double r = kWave.meters(10.25);
    const Complex e = field_at(one, kWave, {0.0, r});
    const Complex expected = std::polar(1.0 / (4.0 * std::numbers::pi * r), -kWave.wavenumber() * r);
    CHECK(std::abs(e - expected) < 1e-14 * std::abs(expected));
}

TEST_CASE("source at the observation point is rejected") {
    const ArrayLayout one(kWave.meters(1.0), {1.0});
    CHECK_THROWS_AS(field_at(one, kWave, {0.0, 0.0}), NumericalError);
}

TEST_CASE("regression fixture at the (0.7, 591) zone center") {
    // 40-digit reference sums.
    const Complex exclusive(0.3296398187309967174, -0.28440683834698272476);
    const Complex inclusive(0.32579726955483377241, -0.28666571060158038737);
    const Point2 center{0.0, kWave.meters(591.0)};
    for (auto [ep, ref] : {std::pair{TaperEndpoint::exclusive, exclusive}, {TaperEndpoint::inclusive, inclusive}}) {
        const ArrayLayout layout(kWave.meters(0.7), make_taper(100, 25, -6.0, ep));
        const Complex e = field_at(layout, kWave, center);
        CHECK(std::abs(e - ref) / std::abs(ref) < 1e-11);
        CHECK(rel_err(e, oracle::field(oracle_sources(layout), 28e9L, center.x, center.y)) < 1e-11);
    }
}

TEST_CASE("field_at matches the extended-precision oracle off-axis, with errors and poses") {
    std::mt19937_64 gen(11);
    std::normal_distribution<double> n01;
    std::vector<Complex> errors;
    for (int i = 0; i < 100; ++i) errors.emplace_back(0.05 * n01(gen), 0.05 * n01(gen));
    const ArrayLayout layout =
        LayoutConfig{}.make_layout(kWave.meters(1.35)).with_errors(errors);
    const auto sources = oracle_sources(layout);
    std::uniform_real_distribution<double> ux(-0.13, 0.13), uy(kWave.meters(286.0) - 0.13, kWave.meters(286.0) + 0.13);
    for (int p = 0; p < 20; ++p) {
        const Point2 pt{ux(gen), uy(gen)};
        CHECK(rel_err(field_at(layout, kWave, pt), oracle::field(sources, 28e9L, pt.x, pt.y)) < 1e-10);
    }

    const Pose pose{{0.4, 0.1}, 0.3};
    std::vector<long double> amps(layout.taper().begin(), layout.taper().end());
    std::vector<oracle::cld> oerr;
    for (auto e : errors) oerr.emplace_back(e.real(), e.imag());
    const auto posed = oracle::array_sources(100, layout.ies_m(), amps, oerr, 0.4L, 0.1L, 0.3L);
    const Point2 pt{0.05, 3.0};
    CHECK(rel_err(field_at(layout, kWave, pt, pose), oracle::field(posed, 28e9L, pt.x, pt.y)) < 1e-10);
}

TEST_CASE("mirror symmetry about boresight") {
    const ArrayLayout layout = LayoutConfig{}.make_layout(kWave.meters(0.7));
    for (double x : {0.01, 0.05, 0.1303}) {
        const double y = kWave.meters(564.0) + 0.02;
        const Complex a = field_at(layout, kWave, {x, y});
        const Complex b = field_at(layout, kWave, {-x, y});
        CHECK(std::abs(a - b) < 1e-10 * std::abs(a));
    }
}

TEST_CASE("superposition is linear in the taper") {
    const auto t = make_taper(100, 25, -6.0, TaperEndpoint::exclusive);
    std::vector<double> t1(100), t2(100);
    for (int i = 0; i < 100; ++i) {
        t1[i] = 0.3 * t[i] + 0.01 * i;
        t2[i] = t[i] - t1[i];
    }
    const double ies = kWave.meters(1.0);
    const Point2 pt{0.03, kWave.meters(469.0)};
    const Complex whole = field_at(ArrayLayout(ies, t), kWave, pt);
    const Complex parts = field_at(ArrayLayout(ies, t1), kWave, pt) + field_at(ArrayLayout(ies, t2), kWave, pt);
    CHECK(std::abs(whole - parts) < 1e-12 * std::abs(whole));
}

TEST_CASE("scaling the taper scales the field and leaves FoMs unchanged") {
    const auto t = make_taper(100, 25, -6.0, TaperEndpoint::exclusive);
    std::vector<double> scaled(t);
    for (auto& v : scaled) v *= 3.7;
    const double ies = kWave.meters(1.2);
    const auto spec = TestZoneSpec::standard(kWave.wavelength_m(), kWave.meters(441.0));
    const auto mesh = build_mesh(spec);
    const auto a = field_at_points(ArrayLayout(ies, t), kWave, mesh.points());
    const auto b = field_at_points(ArrayLayout(ies, scaled), kWave, mesh.points());
    for (std::size_t i = 0; i < a.size(); i += 997) CHECK(std::abs(b[i] - 3.7 * a[i]) < 1e-12 * std::abs(b[i]));
    const auto fa = compute_foms(mesh, a);
    const auto fb = compute_foms(mesh, b);
    CHECK(fb.r_mag_db == doctest::Approx(fa.r_mag_db).epsilon(1e-9));
    CHECK(fb.sigma_mag_db == doctest::Approx(fa.sigma_mag_db).epsilon(1e-9));
    CHECK(fb.r_phs_deg == doctest::Approx(fa.r_phs_deg).epsilon(1e-9));
}

TEST_CASE("far-field limit: residual phase is flat across small offsets") {
    const ArrayLayout layout = LayoutConfig{}.make_layout(kWave.meters(0.5));
    const double y = 1e6 * kWave.wavelength_m();
    const double k = kWave.wavenumber();
    auto residual = [&](double x) {
        const Complex e = field_at(layout, kWave, {x, y}) * std::polar(y, k * y);
        return std::arg(e);
    };
    const double ref = residual(0.0);
    for (double x : {-0.005, 0.002, 0.005}) CHECK(std::abs(residual(x) - ref) < 1e-3);
}

TEST_CASE("field_over_mesh: wrapper identity and thread independence") {
    const ArrayLayout layout = LayoutConfig{}.make_layout(kWave.meters(0.7));
    const TestZoneMesh single({{0.0, kWave.meters(591.0)}}, {0, 1});
    const auto one = field_over_mesh(layout, kWave, single);
    REQUIRE(one.size() == 1);
    CHECK(one[0].value == field_at(layout, kWave, single.points()[0]));

    const auto mesh = build_mesh(TestZoneSpec::standard(kWave.wavelength_m(), kWave.meters(591.0)));
    const auto serial = field_at_points(layout, kWave, mesh.points(), {}, 1);
    for (unsigned threads : {2u, 3u, 8u}) {
        const auto parallel = field_at_points(layout, kWave, mesh.points(), {}, threads);
        REQUIRE(parallel.size() == serial.size());
        bool identical = true;
        for (std::size_t i = 0; i < serial.size(); ++i) identical = identical && parallel[i] == serial[i];
        CHECK(identical);
    }
}

TEST_CASE("full zone at (0.5, 2450) matches the per-point oracle") {
    const ArrayLayout layout = LayoutConfig{}.make_layout(kWave.meters(0.5));
    const auto mesh = build_mesh(TestZoneSpec::standard(kWave.wavelength_m(), kWave.meters(2450.0)));
    const auto values = field_at_points(layout, kWave, mesh.points());
    const auto sources = oracle_sources(layout);
    double worst = 0.0;
    for (std::size_t i = 0; i < values.size(); i += 7) {
        const auto p = mesh.points()[i];
        worst = std::max(worst, rel_err(values[i], oracle::field(sources, 28e9L, p.x, p.y)));
    }
    CHECK(worst < 1e-10);
}
