#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <cstddef>
#include <span>
#include <vector>

#include "rlos/geometry.hpp"
#include "rlos/mesh.hpp"

namespace rlos {

using Complex = std::complex<double>;

/// Monochromatic excitation. The reference amplitude E0 is fixed to 1.
class WaveSpec {
public:
    static constexpr double kReferenceAmplitude = 1.0;

    explicit WaveSpec(double frequency_hz = 28e9);

    double frequency_hz() const { return frequency_hz_; }
    double wavelength_m() const { return wavelength_m_; }
    double wavenumber() const { return wavenumber_; }

    /// Converts a length given in wavelengths to meters.
    double meters(double lambdas) const { return lambdas * wavelength_m_; }
    double lambdas(double meters) const { return meters / wavelength_m_; }

    friend bool operator==(const WaveSpec&, const WaveSpec&) = default;

private:
    double frequency_hz_;
    double wavelength_m_;
    double wavenumber_;
};

/// Which element carries 0 dB at the inner end of an edge taper.
enum class TaperEndpoint {
    /// The innermost tapered element is already 0 dB: n_edge points span [depth, 0].
    inclusive,
    /// 0 dB is reached one element further in: the ramp is depth * (m+1) / n_edge.
    exclusive,
};

/**
 * Symmetric linear-in-dB edge taper, returned in linear amplitude scale.
 *
 * The n_edge outermost elements on each side ramp from depth_db at the array
 * edge towards 0 dB; all other elements are 1.
 */
std::vector<double> make_taper(std::size_t n_elements, std::size_t n_edge, double depth_db,
                               TaperEndpoint endpoint);

/// Uniform linear array of isotropic radiators centered on its pose origin.
class ArrayLayout {
public:
    ArrayLayout(double ies_m, std::vector<double> taper, std::vector<Complex> excitation_errors = {});

    std::size_t n_elements() const { return taper_.size(); }
    double ies_m() const { return ies_m_; }
    /// Physical length (n - 1) * ies.
    double length_m() const;

    /// Element offsets along the array axis, centered on zero.
    std::span<const double> positions() const { return positions_; }
    std::span<const double> taper() const { return taper_; }
    /// Per-element complex perturbations; empty means no error.
    std::span<const Complex> excitation_errors() const { return errors_; }

    /// Effective complex excitation (1 + eps_i) * t_i of element i.
    Complex excitation(std::size_t i) const;

    ArrayLayout with_errors(std::vector<Complex> errors) const;

    Point2 element_position(std::size_t i, const Pose& pose = {}) const;

private:
    double ies_m_;
    std::vector<double> positions_;
    std::vector<double> taper_;
    std::vector<Complex> errors_;
};

/// Contribution excitation * e^{-jkr} / (4 pi r) of one isotropic source at range r > 0.
inline Complex radiated_term(const Complex& excitation, double k, double r) {
    constexpr double inv_four_pi = 1.0 / (4.0 * std::numbers::pi);
    const double phase = k * r;
    const double c = std::cos(phase);
    const double s = std::sin(phase);
    const double amp = inv_four_pi / r;
    return {(excitation.real() * c + excitation.imag() * s) * amp,
            (excitation.imag() * c - excitation.real() * s) * amp};
}

/// E_z at `point` by superposition of spherical waves e^{-jkr}/(4 pi r).
Complex field_at(const ArrayLayout& layout, const WaveSpec& wave, const Point2& point,
                 const Pose& pose = {});

struct FieldSample {
    Point2 position;
    Complex value;
};

/// Evaluates field_at on many points, optionally in parallel. Results do not
/// depend on the worker count.
std::vector<Complex> field_at_points(const ArrayLayout& layout, const WaveSpec& wave,
                                     std::span<const Point2> points, const Pose& pose = {},
                                     unsigned threads = 0);

std::vector<FieldSample> field_over_mesh(const ArrayLayout& layout, const WaveSpec& wave,
                                         const TestZoneMesh& mesh, unsigned threads = 0);

}  // namespace rlos
