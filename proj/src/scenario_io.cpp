#include "hetnet/scenario_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <set>
#include <sstream>

#include "hetnet/errors.hpp"
#include "json.hpp"

namespace hetnet {
namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& where, const std::string& what) {
    throw ConfigError(where + ": " + what);
}

// Rejects keys the schema does not know, which are almost always typos.
void check_keys(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
    if (!obj.is_object()) fail(where, "expected an object");
    const std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& item : obj.items()) {
        if (!ok.count(item.key())) fail(where, "unknown key '" + item.key() + "'");
    }
}

double number(const json& obj, const char* key, const std::string& where) {
    if (!obj.contains(key)) fail(where, std::string("missing '") + key + "'");
    const json& v = obj.at(key);
    if (!v.is_number()) fail(where, std::string("'") + key + "' must be a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) fail(where, std::string("'") + key + "' must be finite");
    return x;
}

double number_or(const json& obj, const char* key, double fallback, const std::string& where) {
    return obj.contains(key) ? number(obj, key, where) : fallback;
}

std::vector<double> numbers(const json& v, const std::string& where) {
    if (!v.is_array()) fail(where, "expected an array of numbers");
    std::vector<double> out;
    for (const json& x : v) {
        if (!x.is_number()) fail(where, "expected an array of numbers");
        out.push_back(x.get<double>());
    }
    return out;
}

std::string model_name(const json& obj, const std::string& where) {
    if (!obj.contains("model") || !obj.at("model").is_string()) fail(where, "missing string 'model'");
    return obj.at("model").get<std::string>();
}

PathLossModel parse_pathloss(const json& j, const std::string& where) {
    const std::string model = model_name(j, where);
    if (model == "power_law") {
        check_keys(j, where, {"model", "alpha"});
        return BoundedPowerLaw{number(j, "alpha", where)};
    }
    if (model == "stretched_exponential") {
        check_keys(j, where, {"model", "alpha", "beta"});
        return StretchedExponential{number(j, "alpha", where), number(j, "beta", where)};
    }
    if (model == "tabulated") {
        check_keys(j, where, {"model", "t", "g"});
        return TabulatedPathLoss{numbers(j.at("t"), where + ".t"), numbers(j.at("g"), where + ".g")};
    }
    fail(where, "unknown path-loss model '" + model + "'");
}

FadingModel parse_fading(const json& j, const std::string& where) {
    const std::string model = model_name(j, where);
    if (model == "rayleigh") {
        check_keys(j, where, {"model"});
        return RayleighPower{};
    }
    if (model == "nakagami") {
        check_keys(j, where, {"model", "m"});
        return NakagamiPower{number(j, "m", where)};
    }
    if (model == "deterministic") {
        check_keys(j, where, {"model", "h"});
        return DeterministicGain{number_or(j, "h", 1.0, where)};
    }
    fail(where, "unknown fading model '" + model + "'");
}

RadialDensity parse_density(const json& j, const std::string& where) {
    const std::string model = model_name(j, where);
    if (model == "homogeneous") {
        check_keys(j, where, {"model"});
        return Homogeneous{};
    }
    if (model == "guard_zone") {
        check_keys(j, where, {"model", "radius"});
        return GuardZone{number(j, "radius", where)};
    }
    if (model == "annulus") {
        check_keys(j, where, {"model", "inner", "outer"});
        return AnnulusExcluded{number(j, "inner", where), number(j, "outer", where)};
    }
    if (model == "custom") {
        check_keys(j, where, {"model", "t", "mu"});
        return CustomDensity{numbers(j.at("t"), where + ".t"), numbers(j.at("mu"), where + ".mu")};
    }
    fail(where, "unknown density model '" + model + "'");
}

TierConfig parse_tier(const json& j, const std::string& where) {
    check_keys(j, where, {"power", "bias", "intensity", "scales_with_kappa", "pathloss", "fading", "density"});
    TierConfig t;
    t.power = number(j, "power", where);
    t.bias = number_or(j, "bias", 1.0, where);
    t.intensity = number(j, "intensity", where);
    if (j.contains("scales_with_kappa")) {
        if (!j.at("scales_with_kappa").is_boolean()) fail(where, "'scales_with_kappa' must be a boolean");
        t.scales_with_kappa = j.at("scales_with_kappa").get<bool>();
    }
    if (j.contains("pathloss")) t.pathloss = parse_pathloss(j.at("pathloss"), where + ".pathloss");
    if (j.contains("fading")) t.fading = parse_fading(j.at("fading"), where + ".fading");
    if (j.contains("density")) t.density = parse_density(j.at("density"), where + ".density");
    return t;
}

// Either an explicit list or {"from", "to", "count"} with evenly spaced points.
std::vector<double> parse_grid(const json& j, const std::string& where) {
    if (j.is_array()) return numbers(j, where);
    check_keys(j, where, {"from", "to", "count"});
    const double from = number(j, "from", where);
    const double to = number(j, "to", where);
    const double count = number(j, "count", where);
    if (!(count >= 2) || count != std::floor(count) || !(to > from)) fail(where, "needs to > from and integer count >= 2");
    const auto n = static_cast<std::size_t>(count);
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = from + (to - from) * static_cast<double>(i) / static_cast<double>(n - 1);
    return out;
}

Policy parse_policy(const json& j, const NetworkScenario& s, const std::string& where) {
    if (!j.contains("type") || !j.at("type").is_string()) fail(where, "missing string 'type'");
    const std::string type = j.at("type").get<std::string>();
    if (type == "barss") {
        check_keys(j, where, {"type"});
        return BarssPolicy{};
    }
    if (type != "generic") fail(where, "unknown policy '" + type + "'");
    check_keys(j, where, {"type", "tier", "distance", "exclusion"});
    const double tier = number(j, "tier", where);
    if (tier != std::floor(tier) || tier < 1 || tier > static_cast<double>(s.size())) {
        fail(where, "'tier' must be an index between 1 and the number of tiers");
    }
    GenericPolicy g;
    g.k = static_cast<std::size_t>(tier) - 1;
    g.r = number(j, "distance", where);
    if (!(g.r >= 0.0)) fail(where, "'distance' must be non-negative");
    g.exclusion = ExclusionProfile::none(s.size());
    if (j.contains("exclusion")) {
        g.exclusion.d = numbers(j.at("exclusion"), where + ".exclusion");
        if (g.exclusion.d.size() != s.size()) fail(where, "'exclusion' needs one radius per tier");
        for (double d : g.exclusion.d) {
            if (!(d >= 0.0)) fail(where, "exclusion radii must be non-negative");
        }
    }
    return g;
}

void parse_mc(const json& j, ScenarioFile& f, const std::string& where) {
    check_keys(j, where,
               {"realizations", "seed", "window", "confidence", "tail", "far_field_skew", "max_expected_stations"});
    SimulationPlan& p = f.mc;
    if (j.contains("realizations")) {
        const double n = number(j, "realizations", where);
        if (n != std::floor(n) || n < 1) fail(where, "'realizations' must be a positive integer");
        p.realizations = static_cast<std::size_t>(n);
    }
    if (j.contains("seed")) {
        if (!j.at("seed").is_number_unsigned()) fail(where, "'seed' must be a non-negative integer");
        p.seed = j.at("seed").get<std::uint64_t>();
    }
    if (j.contains("window")) p.window = numbers(j.at("window"), where + ".window");
    p.confidence = number_or(j, "confidence", p.confidence, where);
    p.far_field_skew = number_or(j, "far_field_skew", p.far_field_skew, where);
    p.max_expected_stations = number_or(j, "max_expected_stations", p.max_expected_stations, where);
    if (j.contains("tail")) {
        const json& t = j.at("tail");
        if (t == "gaussian") {
            p.tail = TailModel::Gaussian;
        } else if (t == "truncate") {
            p.tail = TailModel::Truncate;
        } else {
            fail(where, "'tail' must be \"gaussian\" or \"truncate\"");
        }
    }
}

}  // namespace

ScenarioFile parse_scenario(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("scenario file is not valid JSON: ") + e.what());
    }
    check_keys(doc, "scenario",
               {"name", "description", "noise", "processing_gain", "kappa", "tiers", "sweep", "x_grid", "tau_grid",
                "gamma", "gamma_vec", "policy", "mc"});
    ScenarioFile f;
    f.hash = [&] {
        char buf[17];
        std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(text)));
        return std::string(buf);
    }();
    if (doc.contains("name")) {
        if (!doc.at("name").is_string()) fail("scenario", "'name' must be a string");
        f.name = doc.at("name").get<std::string>();
    }
    if (!doc.contains("tiers") || !doc.at("tiers").is_array() || doc.at("tiers").empty()) {
        fail("scenario", "'tiers' must be a non-empty array");
    }
    std::vector<TierConfig> tiers;
    for (std::size_t i = 0; i < doc.at("tiers").size(); ++i) {
        tiers.push_back(parse_tier(doc.at("tiers").at(i), "tiers[" + std::to_string(i) + "]"));
    }
    const double noise = number_or(doc, "noise", 0.0, "scenario");
    const double pg = number_or(doc, "processing_gain", 1.0, "scenario");
    const double kappa = number_or(doc, "kappa", 1.0, "scenario");
    f.scenario = NetworkScenario(std::move(tiers), noise, pg, kappa);

    f.sweep.values = {kappa};
    if (doc.contains("sweep")) {
        const json& sw = doc.at("sweep");
        check_keys(sw, "sweep", {"parameter", "values"});
        if (sw.contains("parameter") && sw.at("parameter") != "kappa") {
            fail("sweep", "only the 'kappa' parameter can be swept");
        }
        if (!sw.contains("values")) fail("sweep", "missing 'values'");
        f.sweep.values = parse_grid(sw.at("values"), "sweep.values");
        if (f.sweep.values.empty()) fail("sweep", "'values' must not be empty");
        for (double v : f.sweep.values) {
            if (!(v > 0.0)) fail("sweep", "sweep values must be positive");
        }
    }
    if (doc.contains("x_grid")) f.x_grid = parse_grid(doc.at("x_grid"), "x_grid");
    if (doc.contains("tau_grid")) {
        f.tau_grid = parse_grid(doc.at("tau_grid"), "tau_grid");
        for (double t : f.tau_grid) {
            if (!(t >= 0.0)) fail("tau_grid", "rates must be non-negative");
        }
    }
    f.gamma = number_or(doc, "gamma", f.gamma, "scenario");
    if (!(f.gamma > 0.0 && f.gamma < 1.0)) fail("scenario", "'gamma' must lie in (0, 1)");
    f.gamma_vec.assign(f.scenario.size(), f.gamma);
    if (doc.contains("gamma_vec")) {
        f.gamma_vec = numbers(doc.at("gamma_vec"), "gamma_vec");
        if (f.gamma_vec.size() != f.scenario.size()) fail("gamma_vec", "needs one target per tier");
        for (double g : f.gamma_vec) {
            if (!(g > 0.0 && g < 1.0)) fail("gamma_vec", "targets must lie in (0, 1)");
        }
    }
    if (doc.contains("policy")) f.policy = parse_policy(doc.at("policy"), f.scenario, "policy");
    f.mc.x_grid = f.x_grid;
    f.mc.tau_grid = f.tau_grid;
    if (doc.contains("mc")) parse_mc(doc.at("mc"), f, "mc");
    if (!f.mc.window.empty() && f.mc.window.size() != f.scenario.size()) fail("mc", "'window' needs one radius per tier");
    f.mc.validate();
    return f;
}

ScenarioFile load_scenario_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open scenario file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_scenario(ss.str());
}

std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

void CsvWriter::comment(const std::string& line) { out_ << "# " << line << "\r\n"; }

void CsvWriter::row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i > 0) out_ << ',';
        const std::string& c = cells[i];
        if (c.find_first_of(",\"\r\n") == std::string::npos) {
            out_ << c;
            continue;
        }
        out_ << '"';
        for (char ch : c) {
            if (ch == '"') out_ << '"';
            out_ << ch;
        }
        out_ << '"';
    }
    out_ << "\r\n";
}

}  // namespace hetnet
