#pragma once

#include <stdexcept>
#include <string>

namespace froc {

// Malformed or unusable input data (CLI exit code 1).
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Numerical failure: non-convergence, boundary estimate, singular matrix,
// index requested outside its attainable domain (CLI exit code 2).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace froc
