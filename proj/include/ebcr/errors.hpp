#pragma once

#include <stdexcept>
#include <string>

namespace ebcr {

/// Bad user input: malformed files, violated preconditions, unknown options.
class InputError : public std::invalid_argument {
public:
    explicit InputError(const std::string& what) : std::invalid_argument(what) {}
};

/// A numerical routine could not deliver a result at the requested accuracy.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace ebcr
