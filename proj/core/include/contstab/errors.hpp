#pragma once

#include <stdexcept>
#include <string>

namespace contstab {

/// Base class for everything this library throws deliberately.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Geometry parameters violate an invariant (e.g. rho >= r).
class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& what) : Error(what) {}
};

/// A point lies outside the region where an operation is defined.
class DomainError : public Error {
public:
    explicit DomainError(const std::string& what) : Error(what) {}
};

/// A point sits on a branch cut / branch point of a conformal map.
class BranchPointError : public DomainError {
public:
    explicit BranchPointError(const std::string& what) : DomainError(what) {}
};

/// Evaluation at (or too close to) a pole of a kernel or map.
class PoleError : public DomainError {
public:
    explicit PoleError(const std::string& what) : DomainError(what) {}
};

/// Within 1e-10 of a data curve or domain boundary, where the stability
/// constants blow up.  Rejected rather than returning garbage prefactors.
class NearDegenerateError : public DomainError {
public:
    explicit NearDegenerateError(const std::string& what) : DomainError(what) {}
};

/// A truncation cap was hit or too few resolvable eigenvalues remain.
class ResolutionError : public Error {
public:
    explicit ResolutionError(const std::string& what) : Error(what) {}
};

/// Numerical machinery failed: eigensolver breakdown, root bracketing,
/// or a solve requested beyond its conditioning floor.
class NumericalError : public Error {
public:
    explicit NumericalError(const std::string& what) : Error(what) {}
};

} // namespace contstab
