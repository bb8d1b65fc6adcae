#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "hetnet/capacity.hpp"
#include "hetnet/montecarlo.hpp"
#include "hetnet/spatial.hpp"

namespace hetnet {

inline constexpr int kCsvSchemaVersion = 1;

struct SweepSpec {
    std::string parameter = "kappa";
    std::vector<double> values;
};

/// A parsed scenario file: the base scenario, the sweep over kappa, and the
/// evaluation grids and targets used by the commands.
struct ScenarioFile {
    std::string name;
    NetworkScenario scenario{{TierConfig{}}};
    SweepSpec sweep;
    std::vector<double> x_grid;
    std::vector<double> tau_grid;
    double gamma = 0.15;
    std::vector<double> gamma_vec;
    Policy policy = BarssPolicy{};
    SimulationPlan mc;
    /// FNV-1a hash of the file contents, as 16 hex digits.
    std::string hash;

    NetworkScenario at(double sweep_value) const { return scenario.with_kappa(sweep_value); }
};

/// Parses a scenario document. Every validation failure is a ConfigError.
ScenarioFile parse_scenario(std::string_view text);
ScenarioFile load_scenario_file(const std::string& path);

std::uint64_t fnv1a64(std::string_view bytes);

/// Shortest round-trip decimal form, independent of the locale.
std::string format_number(double v);

/// Minimal RFC 4180 writer: one header comment block, then rows.
class CsvWriter {
public:
    explicit CsvWriter(std::ostream& out) : out_(out) {}

    void comment(const std::string& line);
    void row(const std::vector<std::string>& cells);

private:
    std::ostream& out_;
};

}  // namespace hetnet
