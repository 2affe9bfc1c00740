#include "rlos/config.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <set>
#include <sstream>

#include "rlos/error.hpp"

namespace rlos {

using nlohmann::json;

namespace {

const std::set<std::string, std::less<>> kKnownKeys = {
    "frequency_hz",       "n_elements",          "taper_edge",
    "taper_depth_db",     "taper_endpoint",      "tz_radius_lambda",
    "tz_radius_m",        "mesh_pitch_lambda",   "mesh_pitch_m",
    "ies_lambda",         "ies_m",               "d_lambda",
    "d_m",                "d_step_lambda",       "tiers",
    "fom_tier",           "tolerance_geometries_lambda", "tolerance_geometries_m",
    "tolerance_step_db",  "tolerance_n_mc",      "tolerance_tier",
    "tolerance_max_sigma_db", "tolerance_rule",  "precode_geometries_lambda",
    "precode_geometries_m", "snr_db",            "sigma_dut_db",
    "alpha_offsets_deg",  "precoders",           "precode_n_mc",
    "dut_elements",       "dut_ies_lambda",      "dut_ies_m",
    "seed",               "output_dir",
};

[[noreturn]] void reject(std::string_view key, std::string_view what) {
    throw ValidationError("config key '" + std::string(key) + "': " + std::string(what));
}

double number(const json& doc, std::string_view key) {
    const auto& v = doc.at(std::string(key));
    if (!v.is_number()) reject(key, "expected a number");
    return v.get<double>();
}

std::uint64_t unsigned_integer(const json& doc, std::string_view key) {
    const auto& v = doc.at(std::string(key));
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0))
        reject(key, "expected a non-negative integer");
    return v.get<std::uint64_t>();
}

std::vector<double> number_list(const json& doc, std::string_view key) {
    const auto& v = doc.at(std::string(key));
    if (!v.is_array()) reject(key, "expected a list of numbers");
    std::vector<double> out;
    for (const auto& x : v) {
        if (!x.is_number()) reject(key, "expected a list of numbers");
        out.push_back(x.get<double>());
    }
    return out;
}

std::string text(const json& doc, std::string_view key) {
    const auto& v = doc.at(std::string(key));
    if (!v.is_string()) reject(key, "expected a string");
    return v.get<std::string>();
}

/// Resolves a `<base>_lambda` / `<base>_m` pair to meters.
template <typename Read, typename Scale>
auto length_value(const json& doc, const std::string& base, Read read, Scale scale_lambda)
    -> std::optional<decltype(read(doc, base))> {
    const std::string lam = base + "_lambda";
    const std::string met = base + "_m";
    const bool has_lam = doc.contains(lam);
    const bool has_met = doc.contains(met);
    if (has_lam && has_met) reject(lam, "conflicts with '" + met + "'");
    if (has_met) return read(doc, met);
    if (has_lam) return scale_lambda(read(doc, lam));
    return std::nullopt;
}

std::vector<GeometryM> geometry_list(const json& doc, std::string_view key, double scale) {
    const auto& v = doc.at(std::string(key));
    if (!v.is_array() || v.empty()) reject(key, "expected a non-empty list of [ies, D] pairs");
    std::vector<GeometryM> out;
    for (const auto& pair : v) {
        if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number() || !pair[1].is_number())
            reject(key, "expected a list of [ies, D] pairs");
        out.push_back({pair[0].get<double>() * scale, pair[1].get<double>() * scale});
    }
    return out;
}

std::optional<std::vector<GeometryM>> geometries(const json& doc, const std::string& base, double wavelength) {
    const std::string lam = base + "_lambda";
    const std::string met = base + "_m";
    if (doc.contains(lam) && doc.contains(met)) reject(lam, "conflicts with '" + met + "'");
    if (doc.contains(met)) return geometry_list(doc, met, 1.0);
    if (doc.contains(lam)) return geometry_list(doc, lam, wavelength);
    return std::nullopt;
}

TaperEndpoint parse_endpoint(const std::string& s) {
    if (s == "inclusive") return TaperEndpoint::inclusive;
    if (s == "exclusive") return TaperEndpoint::exclusive;
    reject("taper_endpoint", "expected 'inclusive' or 'exclusive'");
}

std::string_view endpoint_name(TaperEndpoint e) {
    return e == TaperEndpoint::inclusive ? "inclusive" : "exclusive";
}

LevelRule parse_rule(const std::string& s) {
    if (s == "sequential_runs") return LevelRule::sequential_runs;
    if (s == "any_of_batch") return LevelRule::any_of_batch;
    reject("tolerance_rule", "expected 'sequential_runs' or 'any_of_batch'");
}

std::string_view rule_name(LevelRule r) {
    return r == LevelRule::sequential_runs ? "sequential_runs" : "any_of_batch";
}

std::vector<FomLimits> parse_tiers(const json& doc) {
    const auto& v = doc.at("tiers");
    if (!v.is_array() || v.empty()) reject("tiers", "expected a non-empty list of limit objects");
    std::vector<FomLimits> tiers;
    for (const auto& t : v) {
        if (!t.is_object()) reject("tiers", "expected objects with sigma_mag_db, r_mag_db, r_phs_deg");
        for (const auto& [k, _] : t.items())
            if (k != "sigma_mag_db" && k != "r_mag_db" && k != "r_phs_deg") reject("tiers", "unknown limit '" + k + "'");
        if (!t.contains("sigma_mag_db") || !t.contains("r_mag_db") || !t.contains("r_phs_deg"))
            reject("tiers", "each tier needs sigma_mag_db, r_mag_db and r_phs_deg");
        tiers.push_back({number(t, "sigma_mag_db"), number(t, "r_mag_db"), number(t, "r_phs_deg")});
    }
    return tiers;
}

std::vector<Precoder> parse_precoders(const json& doc) {
    const auto& v = doc.at("precoders");
    if (!v.is_array() || v.empty()) reject("precoders", "expected a non-empty list of \"MF\"/\"ZF\"");
    std::vector<Precoder> out;
    for (const auto& p : v) {
        if (p == "MF") out.push_back(Precoder::mf);
        else if (p == "ZF") out.push_back(Precoder::zf);
        else reject("precoders", "expected \"MF\" or \"ZF\"");
    }
    return out;
}

bool strictly_increasing(const std::vector<double>& v) {
    return std::adjacent_find(v.begin(), v.end(), std::greater_equal<>()) == v.end();
}

}  // namespace

std::vector<GeometryM> reference_geometries(const WaveSpec& wave) {
    constexpr std::array<std::array<double, 2>, 5> kLambda{{
        {1.35, 286.0}, {1.2, 441.0}, {1.0, 469.0}, {0.7, 564.0}, {0.7, 591.0}}};
    std::vector<GeometryM> out;
    for (const auto& g : kLambda) out.push_back({wave.meters(g[0]), wave.meters(g[1])});
    return out;
}

SweepGrid RunConfig::sweep_grid() const {
    return {ies_m, d_m, tiers};
}

ToleranceSearchConfig RunConfig::tolerance_config() const {
    ToleranceSearchConfig cfg;
    cfg.step_db = tolerance_step_db;
    cfg.n_mc = tolerance_n_mc;
    cfg.limits = tiers.at(static_cast<std::size_t>(tolerance_tier - 1));
    cfg.seed = seed;
    cfg.max_sigma_db = tolerance_max_sigma_db;
    cfg.rule = tolerance_rule;
    return cfg;
}

StudyConfig RunConfig::study_config() const {
    StudyConfig cfg;
    cfg.snr_db = snr_db;
    cfg.sigma_dut_db = sigma_dut_db;
    cfg.alpha_offsets_deg = alpha_offsets_deg;
    cfg.precoders = precoders;
    cfg.n_mc = precode_n_mc;
    cfg.seed = seed;
    cfg.dut_elements = dut_elements;
    cfg.dut_ies_m = dut_ies_m;
    cfg.tz_radius_m = tz_radius_m;
    return cfg;
}

void RunConfig::validate() const {
    if (!(frequency_hz > 0.0)) reject("frequency_hz", "must be positive");
    layout.validate();
    if (!(tz_radius_m > 0.0)) reject("tz_radius_lambda", "must be positive");
    if (!(mesh_pitch_m > 0.0)) reject("mesh_pitch_lambda", "must be positive");
    if (tz_radius_m < mesh_pitch_m / 2.0) reject("tz_radius_lambda", "mesh would be empty (R < pitch/2)");
    if (ies_m.empty() || !strictly_increasing(ies_m) || ies_m.front() <= 0.0)
        reject("ies_lambda", "must be a non-empty, strictly increasing list of positive values");
    if (d_m.empty() || !strictly_increasing(d_m)) reject("d_lambda", "must be a non-empty, strictly increasing list");
    if (d_m.front() <= tz_radius_m) reject("d_lambda", "every D must exceed the test zone radius");
    if (!(d_step_lambda > 0.0)) reject("d_step_lambda", "must be positive");
    if (tiers.empty()) reject("tiers", "at least one tier is required");
    for (const auto& t : tiers) {
        if (!(t.sigma_mag_max_db > 0.0 && t.r_mag_max_db > 0.0 && t.r_phs_max_deg > 0.0))
            reject("tiers", "all limits must be strictly positive");
    }
    const auto n_tiers = static_cast<int>(tiers.size());
    if (fom_tier < 1 || fom_tier > n_tiers) reject("fom_tier", "must index into tiers (1-based)");
    if (tolerance_tier < 1 || tolerance_tier > n_tiers) reject("tolerance_tier", "must index into tiers (1-based)");
    if (!(tolerance_step_db > 0.0)) reject("tolerance_step_db", "must be positive");
    if (tolerance_n_mc < 1) reject("tolerance_n_mc", "must be >= 1");
    if (!(tolerance_max_sigma_db >= tolerance_step_db)) reject("tolerance_max_sigma_db", "must be at least one step");
    if (precode_n_mc < 1) reject("precode_n_mc", "must be >= 1");
    for (const auto* list : {&tolerance_geometries, &precode_geometries})
        for (const auto& g : *list)
            if (!(g.ies_m > 0.0 && g.d_m > tz_radius_m))
                reject(list == &tolerance_geometries ? "tolerance_geometries_lambda" : "precode_geometries_lambda",
                       "each geometry needs ies > 0 and D > test zone radius");
    if (tolerance_geometries.empty()) reject("tolerance_geometries_lambda", "must not be empty");
    if (precode_geometries.empty()) reject("precode_geometries_lambda", "must not be empty");

    const WaveSpec w = wave();
    sweep_grid().validate(layout, w);
    tolerance_config().validate();
    study_config().validate();
}

RunConfig parse_config(const json& doc) {
    if (!doc.is_object()) throw ValidationError("config must be a JSON object");
    for (const auto& [key, _] : doc.items())
        if (!kKnownKeys.contains(key)) reject(key, "unknown key");

    RunConfig c;
    if (doc.contains("frequency_hz")) c.frequency_hz = number(doc, "frequency_hz");
    if (!(c.frequency_hz > 0.0)) reject("frequency_hz", "must be positive");
    const WaveSpec wave(c.frequency_hz);
    const double lam = wave.wavelength_m();
    auto scale = [lam](double v) { return v * lam; };
    auto scale_list = [lam](std::vector<double> v) {
        for (auto& x : v) x *= lam;
        return v;
    };

    if (doc.contains("n_elements")) c.layout.n_elements = unsigned_integer(doc, "n_elements");
    if (doc.contains("taper_edge")) c.layout.taper_edge = unsigned_integer(doc, "taper_edge");
    if (doc.contains("taper_depth_db")) c.layout.taper_depth_db = number(doc, "taper_depth_db");
    if (doc.contains("taper_endpoint")) c.layout.taper_endpoint = parse_endpoint(text(doc, "taper_endpoint"));

    c.tz_radius_m = length_value(doc, "tz_radius", number, scale).value_or(99.0 * lam / 8.0);
    c.mesh_pitch_m = length_value(doc, "mesh_pitch", number, scale).value_or(lam / 8.0);

    if (doc.contains("d_step_lambda")) c.d_step_lambda = number(doc, "d_step_lambda");
    if (!(c.d_step_lambda > 0.0)) reject("d_step_lambda", "must be positive");
    const SweepGrid standard = SweepGrid::standard(wave, c.d_step_lambda);
    c.ies_m = length_value(doc, "ies", number_list, scale_list).value_or(standard.ies_m);
    c.d_m = length_value(doc, "d", number_list, scale_list).value_or(standard.d_m);
    c.tiers = doc.contains("tiers") ? parse_tiers(doc) : standard.tiers;
    if (doc.contains("fom_tier")) c.fom_tier = static_cast<int>(unsigned_integer(doc, "fom_tier"));

    c.tolerance_geometries = geometries(doc, "tolerance_geometries", lam).value_or(reference_geometries(wave));
    if (doc.contains("tolerance_step_db")) c.tolerance_step_db = number(doc, "tolerance_step_db");
    if (doc.contains("tolerance_n_mc")) c.tolerance_n_mc = unsigned_integer(doc, "tolerance_n_mc");
    if (doc.contains("tolerance_tier")) c.tolerance_tier = static_cast<int>(unsigned_integer(doc, "tolerance_tier"));
    if (doc.contains("tolerance_max_sigma_db")) c.tolerance_max_sigma_db = number(doc, "tolerance_max_sigma_db");
    if (doc.contains("tolerance_rule")) c.tolerance_rule = parse_rule(text(doc, "tolerance_rule"));

    const StudyConfig study = StudyConfig::standard(wave);
    c.precode_geometries = geometries(doc, "precode_geometries", lam).value_or(reference_geometries(wave));
    c.snr_db = doc.contains("snr_db") ? number_list(doc, "snr_db") : study.snr_db;
    c.sigma_dut_db = doc.contains("sigma_dut_db") ? number_list(doc, "sigma_dut_db") : study.sigma_dut_db;
    c.alpha_offsets_deg =
        doc.contains("alpha_offsets_deg") ? number_list(doc, "alpha_offsets_deg") : study.alpha_offsets_deg;
    c.precoders = doc.contains("precoders") ? parse_precoders(doc) : study.precoders;
    if (doc.contains("precode_n_mc")) c.precode_n_mc = unsigned_integer(doc, "precode_n_mc");
    if (doc.contains("dut_elements")) c.dut_elements = unsigned_integer(doc, "dut_elements");
    c.dut_ies_m = length_value(doc, "dut_ies", number, scale).value_or(study.dut_ies_m);

    if (doc.contains("seed")) c.seed = unsigned_integer(doc, "seed");
    if (doc.contains("output_dir")) c.output_dir = text(doc, "output_dir");

    c.validate();
    return c;
}

RunConfig parse_config_text(std::string_view text_in) {
    json doc;
    try {
        doc = json::parse(text_in);
    } catch (const json::parse_error& e) {
        throw ValidationError(std::string("config is not valid JSON: ") + e.what());
    }
    return parse_config(doc);
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot read config file " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_config_text(buffer.str());
}

json to_json(const RunConfig& c) {
    auto geometry_json = [](const std::vector<GeometryM>& list) {
        json out = json::array();
        for (const auto& g : list) out.push_back({g.ies_m, g.d_m});
        return out;
    };
    json tiers = json::array();
    for (const auto& t : c.tiers)
        tiers.push_back({{"sigma_mag_db", t.sigma_mag_max_db}, {"r_mag_db", t.r_mag_max_db}, {"r_phs_deg", t.r_phs_max_deg}});
    json precoders = json::array();
    for (auto p : c.precoders) precoders.push_back(std::string(to_string(p)));

    return {
        {"frequency_hz", c.frequency_hz},
        {"n_elements", c.layout.n_elements},
        {"taper_edge", c.layout.taper_edge},
        {"taper_depth_db", c.layout.taper_depth_db},
        {"taper_endpoint", std::string(endpoint_name(c.layout.taper_endpoint))},
        {"tz_radius_m", c.tz_radius_m},
        {"mesh_pitch_m", c.mesh_pitch_m},
        {"ies_m", c.ies_m},
        {"d_m", c.d_m},
        {"d_step_lambda", c.d_step_lambda},
        {"tiers", tiers},
        {"fom_tier", c.fom_tier},
        {"tolerance_geometries_m", geometry_json(c.tolerance_geometries)},
        {"tolerance_step_db", c.tolerance_step_db},
        {"tolerance_n_mc", c.tolerance_n_mc},
        {"tolerance_tier", c.tolerance_tier},
        {"tolerance_max_sigma_db", c.tolerance_max_sigma_db},
        {"tolerance_rule", std::string(rule_name(c.tolerance_rule))},
        {"precode_geometries_m", geometry_json(c.precode_geometries)},
        {"snr_db", c.snr_db},
        {"sigma_dut_db", c.sigma_dut_db},
        {"alpha_offsets_deg", c.alpha_offsets_deg},
        {"precoders", precoders},
        {"precode_n_mc", c.precode_n_mc},
        {"dut_elements", c.dut_elements},
        {"dut_ies_m", c.dut_ies_m},
        {"seed", c.seed},
        {"output_dir", c.output_dir},
    };
}

std::uint64_t config_hash(const RunConfig& config) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : to_json(config).dump()) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace rlos
