#pragma once

#include <stdexcept>
#include <string>

namespace lpising {

// Thrown when an iterative solver exhausts its iteration budget or a
// contraction/convergence prerequisite fails at runtime.  Input validation
// uses std::invalid_argument, mathematical domain violations use
// std::domain_error, and size-limit violations use std::length_error.
struct convergence_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace lpising
