#include "hetnet/cli.hpp"

#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "hetnet/errors.hpp"
#include "hetnet/parallel.hpp"

namespace hetnet {
namespace {

using Row = std::vector<std::string>;

std::string num(double v) { return format_number(v); }

std::vector<double> default_x_grid() {
    std::vector<double> xs(201);
    for (int i = 0; i <= 200; ++i) xs[i] = -5.0 + 0.05 * i;
    return xs;
}

SimulationPlan mc_plan(const CommandOptions& opt, const ScenarioFile& f) {
    SimulationPlan plan = f.mc;
    if (opt.seed) plan.seed = *opt.seed;
    if (opt.realizations) plan.realizations = *opt.realizations;
    plan.validate();
    return plan;
}

bool wants_mc(const CommandOptions& opt) { return opt.mc || opt.command == "mc"; }

void header(CsvWriter& csv, const CommandOptions& opt, const ScenarioFile& f, const SimulationPlan* plan,
            std::optional<double> kappa) {
    csv.comment(std::string("hetnet-bounds ") + HETNET_VERSION + " csv-schema " + std::to_string(kCsvSchemaVersion));
    std::string line = "command=" + opt.command + " config-fnv1a=" + f.hash;
    if (!f.name.empty()) line += " scenario=" + f.name;
    if (plan != nullptr) {
        line += " seed=" + std::to_string(plan->seed) + " realizations=" + std::to_string(plan->realizations);
    }
    if (kappa) line += " kappa=" + num(*kappa);
    csv.comment(line);
}

// Analytical results per sweep value, computed in parallel and kept in sweep
// order.
template <class T, class F>
std::vector<T> sweep_map(const ScenarioFile& f, F&& fn) {
    std::vector<T> out(f.sweep.values.size());
    parallel_for(out.size(), [&](std::size_t i) { out[i] = fn(f.at(f.sweep.values[i])); });
    return out;
}

std::vector<CsvOutput> cdf_command(const CommandOptions& opt, const ScenarioFile& f) {
    const std::vector<double> xs = f.x_grid.empty() ? default_x_grid() : f.x_grid;
    const auto summaries = sweep_map<GaussianSummary>(
        f, [](const NetworkScenario& s) { return gaussian_summary(s, ExclusionProfile::none(s.size())); });
    std::vector<CsvOutput> outputs;
    for (std::size_t i = 0; i < f.sweep.values.size(); ++i) {
        const double kappa = f.sweep.values[i];
        std::optional<SimulationPlan> plan;
        std::optional<AwiResult> awi;
        if (wants_mc(opt)) {
            plan = mc_plan(opt, f);
            plan->x_grid = xs;
            awi = simulate_awi(f.at(kappa), *plan);
        }
        std::ostringstream ss;
        CsvWriter csv(ss);
        header(csv, opt, f, plan ? &*plan : nullptr, kappa);
        Row head{"x", "lower", "upper", "xi"};
        if (awi) {
            head.push_back("empirical");
            head.push_back("dkw_slack");
        }
        csv.row(head);
        for (std::size_t j = 0; j < xs.size(); ++j) {
            const Band b = cdf_band(xs[j], summaries[i]);
            Row row{num(xs[j]), num(b.lower), num(b.upper), num(summaries[i].xi)};
            if (awi) {
                row.push_back(num(awi->empirical_cdf[j]));
                row.push_back(num(awi->slack));
            }
            csv.row(row);
        }
        outputs.push_back({kappa, ss.str()});
    }
    return outputs;
}

// Monte-Carlo estimate of the swept metric and its one-sigma error.
QuantileEstimate mc_metric(const CommandOptions& opt, const ScenarioFile& f, const NetworkScenario& s,
                           const SimulationPlan& plan) {
    if (const auto* g = std::get_if<GenericPolicy>(&f.policy)) {
        if (opt.command == "ase") throw ConfigError("area spectral efficiency needs the biased association policy");
        const std::vector<double> rates = simulate_link_rates(s, plan, g->k, g->r, g->exclusion);
        if (opt.command == "outage") return empirical_outage_capacity(rates, f.gamma);
        double sum = 0.0;
        for (double r : rates) sum += r;
        const double mean = sum / static_cast<double>(rates.size());
        double ss = 0.0;
        for (double r : rates) ss += (r - mean) * (r - mean);
        const double n = static_cast<double>(rates.size());
        return {mean, std::sqrt(ss / (n - 1.0) / n)};
    }
    const BarssResult r = simulate_barss(s, plan);
    if (opt.command == "outage") return r.outage_capacity(f.gamma);
    if (opt.command == "ergodic") return {r.ergodic_mean, r.ergodic_stderr};
    return r.ase(s, f.gamma_vec);
}

std::vector<CsvOutput> band_command(const CommandOptions& opt, const ScenarioFile& f) {
    if (opt.command == "ase" && !f.scenario.all_homogeneous()) {
        throw NonHomogeneousDensity("area spectral efficiency needs homogeneous tiers");
    }
    const auto bands = sweep_map<CapacityBand>(f, [&](const NetworkScenario& s) {
        CapacityEngine engine(s);
        if (opt.command == "outage") return engine.outage_capacity(f.gamma, f.policy);
        if (opt.command == "ergodic") return engine.ergodic_capacity(f.policy);
        if (!std::holds_alternative<BarssPolicy>(f.policy)) {
            throw ConfigError("area spectral efficiency needs the biased association policy");
        }
        return engine.ase(f.gamma_vec);
    });
    std::optional<SimulationPlan> plan;
    if (wants_mc(opt)) plan = mc_plan(opt, f);
    std::ostringstream ss;
    CsvWriter csv(ss);
    header(csv, opt, f, plan ? &*plan : nullptr, std::nullopt);
    Row head{"kappa", "lower", "heuristic", "upper"};
    if (plan) {
        head.push_back("mc_estimate");
        head.push_back("mc_err");
    }
    csv.row(head);
    for (std::size_t i = 0; i < bands.size(); ++i) {
        const double kappa = f.sweep.values[i];
        Row row{num(kappa), num(bands[i].lower), num(bands[i].heuristic), num(bands[i].upper)};
        if (plan) {
            const QuantileEstimate est = mc_metric(opt, f, f.at(kappa), *plan);
            row.push_back(num(est.value));
            row.push_back(num(est.error));
        }
        csv.row(row);
    }
    return {{std::nullopt, ss.str()}};
}

// Long-format summary of every simulated quantity: kappa, metric, value, stderr.
std::vector<CsvOutput> mc_command(const CommandOptions& opt, const ScenarioFile& f) {
    const SimulationPlan plan = mc_plan(opt, f);
    std::ostringstream ss;
    CsvWriter csv(ss);
    header(csv, opt, f, &plan, std::nullopt);
    csv.row({"kappa", "metric", "value", "stderr"});
    for (double kappa : f.sweep.values) {
        const NetworkScenario s = f.at(kappa);
        const std::string k = num(kappa);
        const double n = static_cast<double>(plan.realizations);
        if (!f.x_grid.empty()) {
            const AwiResult awi = simulate_awi(s, plan);
            csv.row({k, "awi_mean", num(awi.sample_mean), num(std::sqrt(awi.sample_variance / n))});
            csv.row({k, "awi_variance", num(awi.sample_variance), ""});
            for (std::size_t j = 0; j < awi.x_grid.size(); ++j) {
                csv.row({k, "awi_cdf_x" + num(awi.x_grid[j]), num(awi.empirical_cdf[j]), num(awi.slack)});
            }
        }
        const BarssResult r = simulate_barss(s, plan);
        for (std::size_t t = 0; t < s.size(); ++t) {
            const double p = r.association_frequency[t];
            csv.row({k, "association_tier" + std::to_string(t + 1), num(p), num(std::sqrt(p * (1.0 - p) / n))});
        }
        for (std::size_t j = 0; j < r.tau_grid.size(); ++j) {
            const double p = r.outage_frequency[j];
            csv.row({k, "outage_tau" + num(r.tau_grid[j]), num(p), num(std::sqrt(p * (1.0 - p) / n))});
        }
        csv.row({k, "ergodic", num(r.ergodic_mean), num(r.ergodic_stderr)});
        const QuantileEstimate co = r.outage_capacity(f.gamma);
        csv.row({k, "outage_capacity", num(co.value), num(co.error)});
        if (s.all_homogeneous()) {
            const QuantileEstimate ase = r.ase(s, f.gamma_vec);
            csv.row({k, "ase", num(ase.value), num(ase.error)});
        }
        csv.row({k, "resampled", std::to_string(r.resampled), ""});
    }
    return {{std::nullopt, ss.str()}};
}

}  // namespace

std::vector<CsvOutput> execute(const CommandOptions& opt, const ScenarioFile& f) {
    if (opt.command == "cdf") return cdf_command(opt, f);
    if (opt.command == "outage" || opt.command == "ergodic" || opt.command == "ase") return band_command(opt, f);
    if (opt.command == "mc") return mc_command(opt, f);
    throw ConfigError("unknown command '" + opt.command + "'");
}

std::string output_path(const std::string& out, double kappa) {
    const std::filesystem::path p(out);
    std::filesystem::path named = p.parent_path() / (p.stem().string() + "_kappa" + format_number(kappa));
    named += p.extension();
    return named.string();
}

int run_command(const CommandOptions& opt, std::ostream& out, std::ostream& diagnostics) {
    try {
        const ScenarioFile file = load_scenario_file(opt.config);
        const std::vector<CsvOutput> docs = execute(opt, file);
        if (opt.out.empty()) {
            for (const CsvOutput& d : docs) out << d.text;
            return kExitOk;
        }
        for (const CsvOutput& d : docs) {
            const std::string path = docs.size() > 1 && d.kappa ? output_path(opt.out, *d.kappa) : opt.out;
            std::ofstream f(path, std::ios::binary);
            if (!f) throw Error("cannot write '" + path + "'");
            f << d.text;
        }
        return kExitOk;
    } catch (const ConfigError& e) {
        diagnostics << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const NonConvergent& e) {
        diagnostics << "non-convergent: " << e.what() << '\n';
        return kExitNonConvergent;
    } catch (const NonHomogeneousDensity& e) {
        diagnostics << "non-homogeneous density: " << e.what() << '\n';
        return kExitNonHomogeneous;
    } catch (const std::exception& e) {
        diagnostics << "error: " << e.what() << '\n';
        return kExitFailure;
    }
}

}  // namespace hetnet
