#pragma once

#include <stdexcept>

namespace kaf {

// A numerical precondition of an analytical formula does not hold
// (non-positive determinant, unstable recursion, failed factorization).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace kaf
