#pragma once

#include <stdexcept>
#include <string>

namespace wpsub {

struct geometry_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct non_invertible_metric : geometry_error {
    using geometry_error::geometry_error;
};

struct degenerate_plane : geometry_error {
    using geometry_error::geometry_error;
};

struct boundary_error : geometry_error {
    using geometry_error::geometry_error;
};

struct not_a_submersion : geometry_error {
    using geometry_error::geometry_error;
};

struct invalid_warping : geometry_error {
    using geometry_error::geometry_error;
};

struct dimension_error : geometry_error {
    using geometry_error::geometry_error;
};

// Raised when a theorem-level check is run on input that violates its hypotheses.
struct hypothesis_violation : geometry_error {
    using geometry_error::geometry_error;
};

} // namespace wpsub
