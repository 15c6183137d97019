#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace dsreg {

/// Thrown when an argument violates an operation's precondition.
class InvalidInput : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

/// Thrown when an iterative routine certifies that its constraint set cannot
/// be reached. Carries the offending group so callers can report it.
class InfeasibleProblem : public std::runtime_error
{
public:
    InfeasibleProblem(const std::string& what, std::size_t group)
        : std::runtime_error(what), group_(group)
    {}

    std::size_t group() const noexcept { return group_; }

private:
    std::size_t group_;
};

} // namespace dsreg
