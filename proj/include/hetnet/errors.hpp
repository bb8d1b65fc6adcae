#pragma once

#include <optional>
#include <stdexcept>
#include <string>

namespace hetnet {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A scenario, tier, or configuration file failed validation.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Adaptive quadrature exhausted its subdivision budget, or an integrand
/// tail decays too slowly to be integrable.
class NonConvergent : public Error {
public:
    explicit NonConvergent(const std::string& what, std::optional<std::size_t> tier = std::nullopt)
        : Error(tier ? what + " (tier " + std::to_string(*tier + 1) + ")" : what), tier_(tier) {}

    std::optional<std::size_t> tier() const noexcept { return tier_; }

private:
    std::optional<std::size_t> tier_;
};

/// A threshold search never saw the monotone curve cross its target.
class Unbounded : public Error {
public:
    using Error::Error;
};

class DegenerateVariance : public Error {
public:
    using Error::Error;
};

class ZeroProbabilityTier : public Error {
public:
    using Error::Error;
};

/// Raised by operations restricted to homogeneous tiers.
class NonHomogeneousDensity : public Error {
public:
    using Error::Error;
};

/// A simulation window fails its truncation audit.
class WindowTooSmall : public Error {
public:
    using Error::Error;
};

/// Too many realizations had an undetermined serving station.
class EmptyRealization : public Error {
public:
    using Error::Error;
};

}  // namespace hetnet
