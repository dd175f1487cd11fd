#pragma once

#include <stdexcept>
#include <string>

namespace qfe {

/// Thrown when an algorithm fails numerically (non-convergence,
/// unidentifiable parameter), as opposed to bad input data.
class numerical_error : public std::runtime_error {
public:
    explicit numerical_error(const std::string& what) : std::runtime_error(what) {}
};

} // namespace qfe
