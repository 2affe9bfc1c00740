#include "rlos/tolerance.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rlos/error.hpp"
#include "rlos/parallel.hpp"

namespace rlos {

double ExcitationErrorModel::sigma_linear() const {
    detail::require(std::isfinite(sigma_db) && sigma_db >= 0.0, "error sigma (dB) must be >= 0");
    return std::pow(10.0, sigma_db / 20.0) - 1.0;
}

std::vector<Complex> draw_errors(const ExcitationErrorModel& model, std::size_t n, CounterRng& stream) {
    const double sigma = model.sigma_linear();
    std::vector<Complex> errors(n);
    for (auto& e : errors) e = sigma * stream.next_complex_gaussian();
    return errors;
}

void ToleranceSearchConfig::validate() const {
    detail::require(std::isfinite(step_db) && step_db > 0.0, "tolerance step_db must be positive");
    detail::require(n_mc >= 1, "tolerance n_mc must be >= 1");
    detail::require(std::isfinite(max_sigma_db) && max_sigma_db >= step_db,
                    "tolerance max_sigma_db must be at least one step");
    limits.validate();
}

PerturbedFieldModel::PerturbedFieldModel(const ArrayLayout& layout, const WaveSpec& wave, TestZoneMesh mesh)
    : mesh_(std::move(mesh)) {
    const ArrayLayout clean(layout.ies_m(), {layout.taper().begin(), layout.taper().end()});
    baseline_ = field_at_points(clean, wave, mesh_.points(), {}, 1);

    const auto points = mesh_.points();
    const auto n = clean.n_elements();
    element_fields_.resize(static_cast<Eigen::Index>(points.size()), static_cast<Eigen::Index>(n));
    const double k = wave.wavenumber();
    for (std::size_t i = 0; i < n; ++i) {
        const Point2 source = clean.element_position(i);
        const Complex excitation = clean.excitation(i);
        for (std::size_t p = 0; p < points.size(); ++p) {
            const double dx = points[p].x - source.x;
            const double dy = points[p].y - source.y;
            const double r = std::sqrt(dx * dx + dy * dy);
            if (r == 0.0) throw NumericalError("mesh point coincides with element " + std::to_string(i));
            element_fields_(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(i)) =
                radiated_term(excitation, k, r);
        }
    }
}

void PerturbedFieldModel::evaluate_batch(const Eigen::MatrixXcd& errors, Eigen::MatrixXcd& out) const {
    detail::require(errors.rows() == element_fields_.cols(), "one error per element required");
    detail::require(errors.cols() >= 1 && static_cast<std::size_t>(errors.cols()) <= kBatch,
                    "batch holds 1 to 16 realizations");
    Eigen::MatrixXcd eps = Eigen::MatrixXcd::Zero(element_fields_.cols(), static_cast<Eigen::Index>(kBatch));
    eps.leftCols(errors.cols()) = errors;
    out.noalias() = element_fields_ * eps;
    const Eigen::Map<const Eigen::VectorXcd> base(baseline_.data(), static_cast<Eigen::Index>(baseline_.size()));
    out.colwise() += base;
}

void PerturbedFieldModel::evaluate(std::span<const Complex> errors, std::vector<Complex>& out) const {
    detail::require(errors.size() == n_elements(), "one error per element required");
    const Eigen::Map<const Eigen::VectorXcd> eps(errors.data(), static_cast<Eigen::Index>(errors.size()));
    Eigen::MatrixXcd fields;
    evaluate_batch(eps, fields);
    out.assign(fields.col(0).data(), fields.col(0).data() + fields.rows());
}

FomValues PerturbedFieldModel::foms(std::span<const Complex> errors) const {
    std::vector<Complex> field;
    evaluate(errors, field);
    return compute_foms(mesh_, field);
}

namespace {

RealizationOutcome outcome_of(const FomValues& values, const FomLimits& limits) {
    const auto report = judge(values, limits);
    if (report.pass) return {};
    return {false, report.failing_foms.front()};
}

}  // namespace

RealizationOutcome evaluate_realization(const PerturbedFieldModel& model, const FomLimits& limits,
                                        double sigma_db, std::uint64_t seed, std::uint64_t level_index,
                                        std::uint64_t realization) {
    CounterRng stream(seed, {level_index, realization});
    const auto errors = draw_errors({sigma_db}, model.n_elements(), stream);
    return outcome_of(model.foms(errors), limits);
}

std::vector<RealizationOutcome> evaluate_realizations(const PerturbedFieldModel& model, const FomLimits& limits,
                                                      double sigma_db, std::uint64_t seed,
                                                      std::uint64_t level_index,
                                                      std::span<const std::uint64_t> realizations,
                                                      unsigned threads) {
    constexpr std::size_t batch = PerturbedFieldModel::kBatch;
    const ExcitationErrorModel error_model{sigma_db};
    const auto n = static_cast<Eigen::Index>(model.n_elements());
    std::vector<RealizationOutcome> outcomes(realizations.size());
    const std::size_t chunks = (realizations.size() + batch - 1) / batch;
    parallel_for(
        chunks,
        [&](std::size_t chunk) {
            const std::size_t first = chunk * batch;
            const std::size_t count = std::min(batch, realizations.size() - first);
            Eigen::MatrixXcd errors(n, static_cast<Eigen::Index>(count));
            for (std::size_t c = 0; c < count; ++c) {
                CounterRng stream(seed, {level_index, realizations[first + c]});
                const auto eps = draw_errors(error_model, model.n_elements(), stream);
                errors.col(static_cast<Eigen::Index>(c)) =
                    Eigen::Map<const Eigen::VectorXcd>(eps.data(), n);
            }
            Eigen::MatrixXcd fields;
            model.evaluate_batch(errors, fields);
            for (std::size_t c = 0; c < count; ++c) {
                const auto col = fields.col(static_cast<Eigen::Index>(c));
                const std::span<const Complex> field(col.data(), static_cast<std::size_t>(col.size()));
                outcomes[first + c] = outcome_of(compute_foms(model.mesh(), field), limits);
            }
        },
        threads == 0 ? default_thread_count() : threads);
    return outcomes;
}

double LevelStatistics::failing_fraction() const {
    return n_realizations == 0 ? 0.0
                               : static_cast<double>(n_failing) / static_cast<double>(n_realizations);
}

LevelStatistics evaluate_level(const PerturbedFieldModel& model, const FomLimits& limits, double sigma_db,
                               std::uint64_t seed, std::uint64_t level_index, std::size_t n_realizations,
                               unsigned threads) {
    std::vector<std::uint64_t> ids(n_realizations);
    for (std::size_t r = 0; r < n_realizations; ++r) ids[r] = r;
    const auto outcomes = evaluate_realizations(model, limits, sigma_db, seed, level_index, ids, threads);

    LevelStatistics stats;
    stats.n_realizations = n_realizations;
    for (const auto& o : outcomes) {
        if (o.pass) continue;
        ++stats.n_failing;
        ++stats.fom_votes[static_cast<std::size_t>(*o.first_failure)];
    }
    return stats;
}

namespace {

// Majority vote; ties go to the earlier FoM in (R_mag, sigma_mag, R_phs) order.
Fom majority(const std::array<std::size_t, 3>& votes) {
    const auto it = std::max_element(votes.begin(), votes.end());
    return static_cast<Fom>(std::distance(votes.begin(), it));
}

std::uint64_t level_count(const ToleranceSearchConfig& cfg) {
    return static_cast<std::uint64_t>(std::floor(cfg.max_sigma_db / cfg.step_db + 1e-9));
}

double level_sigma(const ToleranceSearchConfig& cfg, std::uint64_t level) {
    return static_cast<double>(level) * cfg.step_db;
}

ToleranceResult capped(const ToleranceSearchConfig& cfg) {
    ToleranceResult result;
    result.tolerated_sigma_db = level_sigma(cfg, level_count(cfg));
    result.failing_sigma_db = result.tolerated_sigma_db + cfg.step_db;
    result.exceeds_cap = true;
    result.n_mc = cfg.n_mc;
    return result;
}

ToleranceResult search_sequential(const PerturbedFieldModel& model, const ToleranceSearchConfig& cfg,
                                  unsigned threads) {
    const std::uint64_t levels = level_count(cfg);
    struct RunOutcome {
        std::uint64_t last_passing_level = 0;
        std::optional<Fom> failure;
    };
    std::vector<RunOutcome> runs(cfg.n_mc);
    // All still-passing runs advance one level together.
    std::vector<std::uint64_t> active(cfg.n_mc);
    for (std::size_t r = 0; r < cfg.n_mc; ++r) active[r] = r;
    for (std::uint64_t level = 1; level <= levels && !active.empty(); ++level) {
        const auto outcomes =
            evaluate_realizations(model, cfg.limits, level_sigma(cfg, level), cfg.seed, level, active, threads);
        std::vector<std::uint64_t> still;
        for (std::size_t i = 0; i < active.size(); ++i) {
            RunOutcome& run = runs[active[i]];
            if (outcomes[i].pass) {
                run.last_passing_level = level;
                still.push_back(active[i]);
            } else {
                run.failure = outcomes[i].first_failure;
            }
        }
        active = std::move(still);
    }

    if (std::any_of(runs.begin(), runs.end(), [](const auto& run) { return !run.failure; }))
        return capped(cfg);

    ToleranceResult result;
    double sum = 0.0;
    for (const auto& run : runs) {
        sum += level_sigma(cfg, run.last_passing_level);
        ++result.fom_votes[static_cast<std::size_t>(*run.failure)];
    }
    result.tolerated_sigma_db = sum / static_cast<double>(runs.size());
    result.failing_sigma_db = result.tolerated_sigma_db + cfg.step_db;
    result.first_failing_fom = majority(result.fom_votes);
    result.n_mc = cfg.n_mc;
    return result;
}

ToleranceResult search_any_of_batch(const PerturbedFieldModel& model, const ToleranceSearchConfig& cfg,
                                    unsigned threads) {
    const std::uint64_t levels = level_count(cfg);
    for (std::uint64_t level = 1; level <= levels; ++level) {
        const auto stats =
            evaluate_level(model, cfg.limits, level_sigma(cfg, level), cfg.seed, level, cfg.n_mc, threads);
        if (stats.n_failing == 0) continue;
        ToleranceResult result;
        result.tolerated_sigma_db = level_sigma(cfg, level - 1);
        result.failing_sigma_db = result.tolerated_sigma_db + cfg.step_db;
        result.fom_votes = stats.fom_votes;
        result.first_failing_fom = majority(stats.fom_votes);
        result.n_mc = cfg.n_mc;
        return result;
    }
    return capped(cfg);
}

}  // namespace

ToleranceResult tolerance_search(const PerturbedFieldModel& model, const ToleranceSearchConfig& cfg,
                                 unsigned threads) {
    cfg.validate();
    if (!judge(compute_foms(model.mesh(), model.baseline()), cfg.limits).pass)
        throw ValidationError("geometry violates the limits without excitation errors");
    const unsigned workers = threads == 0 ? default_thread_count() : threads;
    return cfg.rule == LevelRule::sequential_runs ? search_sequential(model, cfg, workers)
                                                  : search_any_of_batch(model, cfg, workers);
}

ToleranceResult tolerance_search(const ArrayLayout& layout, const WaveSpec& wave, const TestZoneSpec& zone,
                                 const ToleranceSearchConfig& cfg, unsigned threads) {
    cfg.validate();
    const PerturbedFieldModel model(layout, wave, build_mesh(zone));
    return tolerance_search(model, cfg, threads);
}

}  // namespace rlos
