#pragma once

#include <stdexcept>
#include <string>

namespace canamrf {

// Shape disagreement between operands.
class DimensionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A caller broke an operation's precondition (non-scalar loss, empty input, ...).
class ContractError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed or inconsistent file content.
class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// NaN/Inf showed up where a finite value was required.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace canamrf
