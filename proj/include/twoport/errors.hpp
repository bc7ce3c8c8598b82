#pragma once

#include <stdexcept>
#include <string>

namespace twoport {

/// Base class for all library errors.
struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// model construction / evaluation
struct dimension_mismatch : error { using error::error; };
struct non_finite : error { using error::error; };
struct singular_at_s : error { using error::error; };
struct bad_grid : error { using error::error; };

// block constructors
struct non_positive_r : error { using error::error; };
struct invalid_params : error { using error::error; };
struct invalid_operating_point : error { using error::error; };
struct infeasible_point : error { using error::error; };
struct non_positive_frequency : error { using error::error; };

// connection operations
struct no_control_input : error { using error::error; };
struct bad_index : error { using error::error; };
struct feedthrough_not_negligible : error { using error::error; };
struct ill_posed_connection : error { using error::error; };

// analysis
struct zero_admittance : error { using error::error; };
struct unstable_block : error { using error::error; };

// netlist front end
struct parse_error : error { using error::error; };
struct unresolved_ref : error { using error::error; };
struct schema_violation : error { using error::error; };

}  // namespace twoport
