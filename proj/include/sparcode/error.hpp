#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sparcode {

// Base of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed or inconsistent input: files, specs, arguments. The CLI maps
// these to exit code 2.
class InputError : public Error {
public:
    using Error::Error;
};

// Failure inside a numerical stage. The CLI maps these to exit code 1.
class NumericalError : public Error {
public:
    using Error::Error;
};

class InvalidArgument : public InputError {
public:
    using InputError::InputError;
};

class ParseError : public InputError {
public:
    ParseError(std::size_t line, const std::string& what)
        : InputError("parse error at line " + std::to_string(line) + ": " + what), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class DimensionMismatch : public InputError {
public:
    using InputError::InputError;
};

class AsymmetryError : public InputError {
public:
    using InputError::InputError;
};

class SpecInvalid : public InputError {
public:
    using InputError::InputError;
};

class UnknownScenario : public InputError {
public:
    explicit UnknownScenario(const std::string& name)
        : InputError("unknown scenario '" + name + "'") {}
};

// A column-indexed numerical failure (zero norm, zero variance, isolated vertex).
class IndexedError : public NumericalError {
public:
    IndexedError(std::size_t index, const std::string& what)
        : NumericalError(what + " (index " + std::to_string(index) + ")"), index_(index) {}
    std::size_t index() const noexcept { return index_; }

private:
    std::size_t index_;
};

class ZeroNormColumn : public IndexedError {
public:
    explicit ZeroNormColumn(std::size_t index) : IndexedError(index, "column has zero norm") {}
};

class ConstantColumn : public IndexedError {
public:
    explicit ConstantColumn(std::size_t index)
        : IndexedError(index, "column has zero standard deviation") {}
};

class IsolatedVertex : public IndexedError {
public:
    explicit IsolatedVertex(std::size_t index) : IndexedError(index, "vertex has zero degree") {}
};

class NonConvergence : public NumericalError {
public:
    NonConvergence(std::size_t column, int iterations)
        : NumericalError("solver did not converge for column " + std::to_string(column) +
                         " after " + std::to_string(iterations) + " iterations"),
          column_(column), iterations_(iterations) {}
    std::size_t column() const noexcept { return column_; }
    int iterations() const noexcept { return iterations_; }

private:
    std::size_t column_;
    int iterations_;
};

class NotPositiveDefinite : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class SolverFailure : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class AllScoresZero : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class DegenerateComponent : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class NotEnoughPoints : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class EverythingRejected : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class InvalidK : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class EmptyGraph : public NumericalError {
public:
    using NumericalError::NumericalError;
};

}  // namespace sparcode
