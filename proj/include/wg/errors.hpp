#pragma once

#include <stdexcept>
#include <string>

namespace wg {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

class OutOfRange : public Error {
public:
    using Error::Error;
};

/// Structurally inconsistent mesh: open loops, dangling edges, degenerate cells.
class MalformedMesh : public Error {
public:
    using Error::Error;
};

class MalformedCell : public Error {
public:
    using Error::Error;
};

class MalformedEdge : public Error {
public:
    using Error::Error;
};

/// Requested operation needs data the mesh/system does not carry.
class ConfigurationError : public Error {
public:
    using Error::Error;
};

/// Factorization succeeded but the residual contract was not met.
class SolverFailure : public Error {
public:
    using Error::Error;
};

/// Rank deficiency beyond the constant-pressure kernel.
class SingularSystem : public SolverFailure {
public:
    using SolverFailure::SolverFailure;
};

} // namespace wg
