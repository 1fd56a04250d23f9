#pragma once

#include <stdexcept>
#include <string>

namespace chow {

/// Malformed or out-of-domain input (bad discriminant, unknown place, ...).
class invalid_input : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Declared field data that is syntactically or semantically unusable.
class data_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A bounded search or enumeration ran past its configured ceiling. Never
/// used to signal a negative answer.
class bound_exceeded : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace chow
