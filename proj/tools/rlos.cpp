// rlos: command-line front end for the Random-LOS test-zone simulator.
//
//   rlos fom --ies-lambda 0.7 --d-lambda 591 --tier 3
//   rlos sweep --config sweep.json
//   rlos tolerance --n-mc 100 --seed 7
//   rlos precode -o surface.csv
//
// Worker threads come from RLOS_THREADS (default: all cores).

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "rlos/config.hpp"
#include "rlos/error.hpp"
#include "rlos/report.hpp"

namespace {

nlohmann::json read_document(const std::string& path) {
    if (path.empty()) return nlohmann::json::object();
    std::ifstream in(path);
    if (!in) throw rlos::ValidationError("cannot read config file " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    try {
        return nlohmann::json::parse(buffer.str());
    } catch (const nlohmann::json::parse_error& e) {
        throw rlos::ValidationError(std::string("config is not valid JSON: ") + e.what());
    }
}

void set_length(nlohmann::json& doc, const std::string& base, double lambdas) {
    doc.erase(base + "_m");
    doc[base + "_lambda"] = nlohmann::json::array({lambdas});
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Random-LOS OTA test-zone simulator"};
    app.require_subcommand(1, 1);

    std::string config_path;
    std::string output_path;
    std::string output_dir;
    std::optional<double> ies_lambda;
    std::optional<double> d_lambda;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> n_mc;
    std::optional<unsigned> tier;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("-c,--config", config_path, "JSON configuration file")->check(CLI::ExistingFile);
        sub->add_option("-o,--output", output_path, "CSV output file (default <output_dir>/<subcommand>.csv)");
        sub->add_option("--output-dir", output_dir, "Directory for CSV artifacts");
        sub->add_option("--seed", seed, "Random seed");
    };

    auto* fom = app.add_subcommand("fom", "Figures of merit for one (IES, D)");
    add_common(fom);
    fom->add_option("--ies-lambda", ies_lambda, "Chamber array inter-element spacing in wavelengths");
    fom->add_option("--d-lambda", d_lambda, "Test-zone distance in wavelengths");
    fom->add_option("--tier", tier, "Limit tier (1-based)");

    auto* sweep = app.add_subcommand("sweep", "Compliance map over the (IES, D) grid");
    add_common(sweep);

    auto* tolerance = app.add_subcommand("tolerance", "Tolerated excitation error per geometry");
    add_common(tolerance);
    tolerance->add_option("--n-mc", n_mc, "Monte-Carlo runs per geometry");
    tolerance->add_option("--tier", tier, "Limit tier (1-based)");

    auto* precode = app.add_subcommand("precode", "MF/ZF sum rate under DUT weight errors");
    add_common(precode);
    precode->add_option("--n-mc", n_mc, "Monte-Carlo iterations per cell");

    CLI11_PARSE(app, argc, argv);
    const std::string name = app.get_subcommands().front()->get_name();

    rlos::RunConfig config;
    try {
        auto doc = read_document(config_path);
        if (ies_lambda) set_length(doc, "ies", *ies_lambda);
        if (d_lambda) set_length(doc, "d", *d_lambda);
        if (seed) doc["seed"] = *seed;
        if (!output_dir.empty()) doc["output_dir"] = output_dir;
        if (n_mc) doc[name == "precode" ? "precode_n_mc" : "tolerance_n_mc"] = *n_mc;
        if (tier) doc[name == "fom" ? "fom_tier" : "tolerance_tier"] = *tier;
        config = rlos::parse_config(doc);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return static_cast<int>(rlos::ExitCode::validation_error);
    }
    return static_cast<int>(rlos::dispatch(name, config, output_path, std::cerr));
}
