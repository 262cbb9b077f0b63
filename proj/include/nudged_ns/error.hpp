#pragma once

#include <stdexcept>
#include <string>

namespace nudged_ns {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input file; carries the 1-based line number.
class ParseError : public Error {
public:
    ParseError(const std::string& what, int line)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
    int line() const noexcept { return line_; }

private:
    int line_;
};

/// A mesh violates positivity, conformity or boundary-tag invariants.
class ConformityError : public Error {
public:
    using Error::Error;
};

/// Point location failed.
class NotFoundError : public Error {
public:
    using Error::Error;
};

class DegenerateCellError : public Error {
public:
    using Error::Error;
};

class DimensionError : public Error {
public:
    using Error::Error;
};

class SingularMatrixError : public Error {
public:
    using Error::Error;
};

/// Coarse and fine meshes of an observer are not nested.
class NestingError : public Error {
public:
    using Error::Error;
};

class UnknownTagError : public Error {
public:
    using Error::Error;
};

/// Invalid or inconsistent run configuration.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// A linear solve failed inside the time loop.
class SolverError : public Error {
public:
    SolverError(const std::string& what, long step)
        : Error("step " + std::to_string(step) + ": " + what), step_(step) {}
    long step() const noexcept { return step_; }

private:
    long step_;
};

class TrajectoryError : public Error {
public:
    using Error::Error;
};

} // namespace nudged_ns
