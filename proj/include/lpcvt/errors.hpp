#ifndef LPCVT_ERRORS_HPP
#define LPCVT_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace lpcvt {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Anisotropy tensor has an eigenvalue <= eps_pd; the field is invalid.
class NotPositiveDefinite : public Error {
public:
    using Error::Error;
};

/// Frame matrix determinant too small to normalize.
class DegenerateFrame : public Error {
public:
    using Error::Error;
};

/// Tensor field has no samples.
class EmptyField : public Error {
public:
    using Error::Error;
};

/// Lp exponent violates the closed-form requirements (even, 2 <= p <= 16).
class OddP : public Error {
public:
    using Error::Error;
};

/// Constraint system for a cell vertex is numerically singular.
class NearDegenerate : public Error {
public:
    using Error::Error;
};

/// Input file could not be parsed; message carries the line number.
class ParseError : public Error {
public:
    using Error::Error;
};

/// Half-space intersection is not a bounded polytope.
class UnboundedPolytope : public Error {
public:
    using Error::Error;
};

/// Mesh file contains a face with more or fewer than three vertices.
class NonTriangleFace : public Error {
public:
    using Error::Error;
};

/// Filesystem write/read failure.
class IoError : public Error {
public:
    using Error::Error;
};

/// Energy or gradient evaluated to NaN/Inf.
class NonFiniteEnergy : public Error {
public:
    using Error::Error;
};

/// Factorial argument outside the exactly-representable range.
class Overflow : public Error {
public:
    using Error::Error;
};

}  // namespace lpcvt

#endif
