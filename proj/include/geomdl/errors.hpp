#pragma once

#include <stdexcept>
#include <string>

namespace geomdl {

// Error taxonomy. The CLI maps these onto exit codes:
//   invalid_input, insufficient_data          -> 2 (bad input)
//   not_positive_definite, rank_deficient,
//   degenerate_model, domain_error,
//   accuracy_error, constraint_violation      -> 3 (numerical degeneracy)
//   resource_error                            -> 4 (resource limit)
struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct invalid_input : error { using error::error; };
struct insufficient_data : error { using error::error; };
struct constraint_violation : error { using error::error; };
struct not_positive_definite : error { using error::error; };
struct rank_deficient : error { using error::error; };
struct degenerate_model : error { using error::error; };
struct domain_error : error { using error::error; };
struct accuracy_error : error { using error::error; };
struct resource_error : error { using error::error; };

} // namespace geomdl
