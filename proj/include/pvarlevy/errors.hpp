#pragma once

#include <stdexcept>
#include <string>

namespace pvarlevy {

// Bad input: malformed paths, inconsistent models, out-of-range parameters.
class ValidationError : public std::invalid_argument {
public:
    explicit ValidationError(const std::string& what) : std::invalid_argument(what) {}
};

// A computation that cannot be carried out to the requested accuracy
// (divergent integrals, Richardson failures, underdetermined witnesses).
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace pvarlevy
