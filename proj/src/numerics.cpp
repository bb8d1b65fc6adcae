#include "hetnet/numerics.hpp"

#include <cmath>
#include <numbers>

namespace hetnet::numerics {

void QuadratureSpec::validate() const {
    if (!(relative_tolerance > 0.0)) throw ConfigError("quadrature relative tolerance must be positive");
    if (!(absolute_floor >= 0.0)) throw ConfigError("quadrature absolute floor must be non-negative");
    if (max_subdivisions < 1) throw ConfigError("quadrature needs at least one subdivision");
}

double std_normal_cdf(double x) {
    return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

}  // namespace hetnet::numerics
