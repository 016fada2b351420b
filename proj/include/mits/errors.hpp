#pragma once

#include <stdexcept>
#include <string>

namespace mits {

// Malformed or out-of-contract caller input (bad CSV, window violation, ...).
class input_error : public std::runtime_error {
public:
    explicit input_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Numerical or model-level failure (rank deficiency, degenerate phase, ...).
class model_error : public std::runtime_error {
public:
    explicit model_error(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace mits
