#include "rlos/report.hpp"

#include <filesystem>
#include <fstream>
#include <iterator>

#include <fmt/format.h>

#include "rlos/error.hpp"

namespace rlos {

namespace {

std::string failing_list(const std::vector<Fom>& foms) {
    if (foms.empty()) return "none";
    std::string out;
    for (std::size_t i = 0; i < foms.size(); ++i) {
        if (i > 0) out += ';';
        out += to_string(foms[i]);
    }
    return out;
}

const char* flag(bool b) {
    return b ? "true" : "false";
}

}  // namespace

std::string csv_preamble(const RunConfig& config) {
    return fmt::format("# rlos {} config_hash={:016x} seed={}\n", kVersion, config_hash(config), config.seed);
}

std::string fom_csv(const RunConfig& config, std::span<const FomRow> rows) {
    const WaveSpec wave = config.wave();
    std::string out = csv_preamble(config);
    out += "ies_lambda,L_lambda,D_lambda,R_mag_dB,sigma_mag_dB,R_phs_deg,pass,failing_foms\n";
    for (const auto& row : rows) {
        const auto& r = row.report;
        fmt::format_to(std::back_inserter(out), "{:.4f},{:.4f},{:.4f},{:.6f},{:.6f},{:.6f},{},{}\n",
                       wave.lambdas(row.ies_m), wave.lambdas(row.length_m), wave.lambdas(row.d_m), r.r_mag_db,
                       r.sigma_mag_db, r.r_phs_deg, flag(r.pass), failing_list(r.failing_foms));
    }
    return out;
}

std::string sweep_csv(const RunConfig& config, const ComplianceMap& map) {
    const WaveSpec wave = config.wave();
    std::string out = csv_preamble(config);
    out += "ies_lambda,L_lambda,D_lambda,R_mag_dB,sigma_mag_dB,R_phs_deg";
    for (std::size_t t = 0; t < map.tiers.size(); ++t) fmt::format_to(std::back_inserter(out), ",pass_tier{}", t + 1);
    out += '\n';
    for (const auto& cell : map.cells) {
        fmt::format_to(std::back_inserter(out), "{:.4f},{:.4f},{:.4f},{:.6f},{:.6f},{:.6f}", wave.lambdas(cell.ies_m),
                       wave.lambdas(cell.length_m), wave.lambdas(cell.d_m), cell.values.r_mag_db,
                       cell.values.sigma_mag_db, cell.values.r_phs_deg);
        for (const auto& report : cell.reports) fmt::format_to(std::back_inserter(out), ",{}", flag(report.pass));
        out += '\n';
    }
    return out;
}

std::string tolerance_csv(const RunConfig& config, std::span<const ToleranceRow> rows) {
    const WaveSpec wave = config.wave();
    std::string out = csv_preamble(config);
    out += "L_lambda,ies_lambda,D_lambda,tolerated_sigma_db,failing_fom,n_mc,seed\n";
    for (const auto& row : rows) {
        const auto& r = row.result;
        const std::string fom = r.exceeds_cap ? "exceeds_cap" : std::string(to_string(*r.first_failing_fom));
        fmt::format_to(std::back_inserter(out), "{:.4f},{:.4f},{:.4f},{:.4f},{},{},{}\n", wave.lambdas(row.length_m),
                       wave.lambdas(row.ies_m), wave.lambdas(row.d_m), r.tolerated_sigma_db, fom, r.n_mc,
                       config.seed);
    }
    return out;
}

std::string precode_csv(const RunConfig& config, const SumRateSurface& surface) {
    const WaveSpec wave = config.wave();
    std::string out = csv_preamble(config);
    out += "L_lambda,D_lambda,alpha_deg,precoder,snr_db,sigma_dut_db,avg_sum_rate,n_mc,seed\n";
    for (const auto& c : surface.cells) {
        fmt::format_to(std::back_inserter(out), "{:.4f},{:.4f},{:.4f},{},{:.2f},{:.2f},{:.6f},{},{}\n",
                       wave.lambdas(c.length_m), wave.lambdas(c.d_m), c.alpha_deg, to_string(c.precoder), c.snr_db,
                       c.sigma_dut_db, c.avg_sum_rate, surface.n_mc, surface.seed);
    }
    return out;
}

std::string run_subcommand(std::string_view subcommand, const RunConfig& config, unsigned threads) {
    config.validate();
    const WaveSpec wave = config.wave();

    if (subcommand == "fom") {
        if (config.ies_m.size() != 1 || config.d_m.size() != 1)
            throw ValidationError("fom needs exactly one ies and one D value");
        const auto layout = config.layout.make_layout(config.ies_m.front());
        const auto limits = config.tiers.at(static_cast<std::size_t>(config.fom_tier - 1));
        const FomRow row{config.ies_m.front(), layout.length_m(), config.d_m.front(),
                         evaluate_fom(layout, wave, config.zone(config.d_m.front()), limits, threads)};
        return fom_csv(config, std::span(&row, 1));
    }
    if (subcommand == "sweep") {
        const auto map =
            run_sweep(config.sweep_grid(), config.layout, wave, config.tz_radius_m, config.mesh_pitch_m, threads);
        return sweep_csv(config, map);
    }
    if (subcommand == "tolerance") {
        std::vector<ToleranceRow> rows;
        for (const auto& g : config.tolerance_geometries) {
            const auto layout = config.layout.make_layout(g.ies_m);
            rows.push_back({g.ies_m, layout.length_m(), g.d_m,
                            tolerance_search(layout, wave, config.zone(g.d_m), config.tolerance_config(), threads)});
        }
        return tolerance_csv(config, rows);
    }
    if (subcommand == "precode") {
        std::vector<StudyGeometry> geometries;
        for (const auto& g : config.precode_geometries) geometries.push_back({g.ies_m, g.d_m});
        return precode_csv(config, run_study(config.layout, wave, geometries, config.study_config(), threads));
    }
    throw ValidationError("unknown subcommand '" + std::string(subcommand) +
                          "' (expected fom, sweep, tolerance or precode)");
}

ExitCode dispatch(std::string_view subcommand, const RunConfig& config, const std::string& output_path,
                  std::ostream& log, unsigned threads) {
    try {
        const std::string csv = run_subcommand(subcommand, config, threads);
        const std::filesystem::path path =
            output_path.empty() ? std::filesystem::path(config.output_dir) / (std::string(subcommand) + ".csv")
                                : std::filesystem::path(output_path);
        if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
        std::ofstream out(path, std::ios::binary);
        if (!out) throw ValidationError("cannot write " + path.string());
        out << csv;
        if (!out.flush()) throw ValidationError("failed writing " + path.string());
        log << "wrote " << path.string() << '\n';
        return ExitCode::success;
    } catch (const ValidationError& e) {
        log << "error: " << e.what() << '\n';
        return ExitCode::validation_error;
    } catch (const std::exception& e) {
        log << "error: " << e.what() << '\n';
        return ExitCode::numerical_failure;
    }
}

}  // namespace rlos
