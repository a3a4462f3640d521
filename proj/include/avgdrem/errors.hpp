#pragma once

#include <stdexcept>
#include <string>

namespace avgdrem {

/// Operand shapes do not agree.
class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A numerical solve failed or produced an unusable result.
class SolverError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A parameter lies outside its admissible range.
class ParameterError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

}  // namespace avgdrem
