// errors.hpp

#pragma once

#include <stdexcept>
#include <string>

namespace hqmm {

// Below this, an outcome probability is treated as exactly zero.
inline constexpr double kZeroProbability = 1e-300;

// Raised when a conditioning step meets an outcome of (numerically) zero
// probability: projecting onto an empty branch, filtering a sequence the
// model cannot emit, and so on.
class impossible_observation : public std::runtime_error {
public:
    explicit impossible_observation(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace hqmm
