#pragma once

#include <stdexcept>
#include <string>

namespace trinopo {

// Raised for malformed configuration / input files. CLI maps this to exit code 2.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Raised when a model is evaluated outside its domain (below threshold, DC
// singularity, no phase-matching solution, ...). CLI maps this to exit code 3.
struct ModelError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace trinopo
