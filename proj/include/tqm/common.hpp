#pragma once

#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace tqm {

using cplx = std::complex<double>;

inline constexpr double pi = std::numbers::pi;
inline constexpr cplx I{0.0, 1.0};

// Bad inputs: invalid parameters, schedule violations, unknown units.
struct ConfigError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Numerical validity guards (resolution, paraxial, overlap, singularities).
struct ValidityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace tqm
