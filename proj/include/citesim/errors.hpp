#pragma once

#include <stdexcept>

namespace citesim {

// A parameter or input violates a documented precondition.
struct ValidationError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// A computation left its supported numerical range: overflow in exp,
// quadrature that does not converge, mass that never reaches the
// requested quantile, and similar.
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace citesim
