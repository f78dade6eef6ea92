#pragma once

#include <stdexcept>
#include <string>

namespace poppersim {

// Numerical guard failures that depend on runtime data rather than on
// malformed arguments. Input validation failures throw std::invalid_argument.

// Grid cannot represent the requested state or evolution: analytic support
// leaks outside the box, or evolved mass reaches the boundary strips.
class GridTooSmallError : public std::runtime_error {
public:
    explicit GridTooSmallError(const std::string& what) : std::runtime_error(what) {}
};

// Coincidence post-selection left less mass than the floor.
class EmptyPostSelectionError : public std::runtime_error {
public:
    explicit EmptyPostSelectionError(const std::string& what) : std::runtime_error(what) {}
};

// Conditioning band carries less probability than the floor.
class UndefinedConditionalError : public std::runtime_error {
public:
    explicit UndefinedConditionalError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace poppersim
