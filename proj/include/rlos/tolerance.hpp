#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "rlos/field.hpp"
#include "rlos/fom.hpp"
#include "rlos/mesh.hpp"
#include "rlos/rng.hpp"

namespace rlos {

/// Complex Gaussian excitation error whose per-part deviation is specified in dB:
/// sigma_linear = 10^(sigma_db / 20) - 1.
struct ExcitationErrorModel {
    double sigma_db = 0.0;

    double sigma_linear() const;
};

/// Draws n errors eps = N(0, s) + j N(0, s), one fresh complex draw per element.
std::vector<Complex> draw_errors(const ExcitationErrorModel& model, std::size_t n, CounterRng& stream);

/// How a Monte-Carlo level is judged during the tolerance search.
enum class LevelRule {
    /// Each of n_mc runs raises sigma step by step with one realization per
    /// step and stops at its own first failure; the result is the mean over runs.
    sequential_runs,
    /// All n_mc realizations are drawn at every step; the step fails as soon
    /// as any one of them fails.
    any_of_batch,
};

struct ToleranceSearchConfig {
    double step_db = 0.01;
    std::size_t n_mc = 100;
    FomLimits limits = FomLimits::tier(1);
    std::uint64_t seed = 1;
    double max_sigma_db = 2.0;
    LevelRule rule = LevelRule::sequential_runs;

    void validate() const;

    friend bool operator==(const ToleranceSearchConfig&, const ToleranceSearchConfig&) = default;
};

struct ToleranceResult {
    /// Largest sigma (dB) that passed; a mean over runs for sequential_runs.
    double tolerated_sigma_db = 0.0;
    /// Always tolerated_sigma_db + step_db.
    double failing_sigma_db = 0.0;
    /// FoM that failed first; empty when the search hit max_sigma_db.
    std::optional<Fom> first_failing_fom;
    bool exceeds_cap = false;
    /// Failure attributions per FoM (R_mag, sigma_mag, R_phs).
    std::array<std::size_t, 3> fom_votes{};
    std::size_t n_mc = 0;
};

/**
 * Field over a fixed mesh as an affine function of the excitation errors:
 * E = E0 + G * eps, with G(p, i) = t_i e^{-jkr}/(4 pi r).
 *
 * E0 comes from field_at_points, so the zero-error field (and its FoMs) is
 * bit-identical to evaluate_fom.
 */
class PerturbedFieldModel {
public:
    PerturbedFieldModel(const ArrayLayout& layout, const WaveSpec& wave, TestZoneMesh mesh);

    const TestZoneMesh& mesh() const { return mesh_; }
    std::size_t n_elements() const { return static_cast<std::size_t>(element_fields_.cols()); }
    std::span<const Complex> baseline() const { return baseline_; }

    /// Realizations per product with G. Every product is padded to exactly this
    /// width so a realization's field does not depend on what it was batched with.
    static constexpr std::size_t kBatch = 16;

    /// Field for one error realization; `out` is resized as needed.
    void evaluate(std::span<const Complex> errors, std::vector<Complex>& out) const;

    /// Fields for up to kBatch realizations, one per column of `errors`
    /// (n_elements x k). Column c of `out` (mesh size x kBatch) holds realization c.
    void evaluate_batch(const Eigen::MatrixXcd& errors, Eigen::MatrixXcd& out) const;

    FomValues foms(std::span<const Complex> errors) const;

private:
    TestZoneMesh mesh_;
    std::vector<Complex> baseline_;
    Eigen::MatrixXcd element_fields_;
};

/// Outcome of one error realization.
struct RealizationOutcome {
    bool pass = true;
    std::optional<Fom> first_failure;
};

/// Scores the realization keyed by (seed, level_index, realization) at sigma_db.
RealizationOutcome evaluate_realization(const PerturbedFieldModel& model, const FomLimits& limits,
                                        double sigma_db, std::uint64_t seed, std::uint64_t level_index,
                                        std::uint64_t realization);

/// evaluate_realization for several realizations at once; same results.
std::vector<RealizationOutcome> evaluate_realizations(const PerturbedFieldModel& model, const FomLimits& limits,
                                                      double sigma_db, std::uint64_t seed,
                                                      std::uint64_t level_index,
                                                      std::span<const std::uint64_t> realizations,
                                                      unsigned threads = 0);

struct LevelStatistics {
    std::size_t n_realizations = 0;
    std::size_t n_failing = 0;
    std::array<std::size_t, 3> fom_votes{};

    double failing_fraction() const;
};

/// All realizations 0..n-1 at one error level.
LevelStatistics evaluate_level(const PerturbedFieldModel& model, const FomLimits& limits, double sigma_db,
                               std::uint64_t seed, std::uint64_t level_index, std::size_t n_realizations,
                               unsigned threads = 0);

/// Stepped Monte-Carlo search for the largest tolerated excitation error.
/// Throws ValidationError if the geometry already fails with zero error.
ToleranceResult tolerance_search(const PerturbedFieldModel& model, const ToleranceSearchConfig& cfg,
                                 unsigned threads = 0);

ToleranceResult tolerance_search(const ArrayLayout& layout, const WaveSpec& wave, const TestZoneSpec& zone,
                                 const ToleranceSearchConfig& cfg, unsigned threads = 0);

}  // namespace rlos
