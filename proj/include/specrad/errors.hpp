#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace specrad {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Operands belong to different catalog groups.
class GroupMismatch : public Error {
public:
    using Error::Error;
};

/// A precondition on the inputs of an operation does not hold.
class InvalidInput : public Error {
public:
    using Error::Error;
};

/// A configuration file does not match the experiment schema.
class SchemaError : public Error {
public:
    using Error::Error;
};

/// An element-count or support-size budget was exhausted.
///
/// `completed` is the number of stages (product-set levels, doublings,
/// powers) that finished before the budget ran out.
class BudgetExceeded : public Error {
public:
    BudgetExceeded(const std::string& what, std::size_t completed)
        : Error(what), completed_(completed) {}

    std::size_t completed() const noexcept { return completed_; }

private:
    std::size_t completed_;
};

}  // namespace specrad
