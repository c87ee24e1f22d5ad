#pragma once

#include <stdexcept>
#include <string>

namespace befpp {

// Error hierarchy shared by all components. Every throwing path uses one of
// these so callers can distinguish bad inputs from numerical trouble.
struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Argument outside the mathematical domain of an operation.
struct domain_error : error {
    using error::error;
};

// Inconsistent or infeasible configuration (contour geometry, grid sizes, ...).
struct config_error : error {
    using error::error;
};

// A resource guard tripped (event caps, row caps).
struct resource_error : error {
    using error::error;
};

// A requested tolerance could not be met; message carries diagnostics.
struct accuracy_error : error {
    using error::error;
};

// A matrix entry or exponent left the representable double range.
struct range_error : error {
    using error::error;
};

} // namespace befpp
