#pragma once

#include <stdexcept>
#include <string>

namespace diskconf {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Malformed input file.
class ParseError : public Error {
public:
    using Error::Error;
};

/// Mesh violates the disk-topology input class (wrong Euler characteristic,
/// wrong number of boundary loops, non-manifold edge, inconsistent orientation).
class TopologyError : public Error {
public:
    using Error::Error;
};

/// Zero-area face, repeated vertex in a face, or an angle too close to 0 or pi.
class DegenerateFaceError : public Error {
public:
    DegenerateFaceError(const std::string& msg, int face) : Error(msg), face_index(face) {}
    int face_index = -1;
};

/// Sparse factorization failed or conjugate gradient broke down.
class NotPositiveDefiniteError : public Error {
public:
    using Error::Error;
};

/// Iterative solver hit its iteration cap before reaching tolerance.
class MaxIterationsError : public Error {
public:
    using Error::Error;
};

/// Vanishing denominator in a per-face Beltrami quotient (degenerate image face).
class DivisionByZeroError : public Error {
public:
    DivisionByZeroError(const std::string& msg, int face) : Error(msg), face_index(face) {}
    int face_index = -1;
};

/// A face of the forward map has |mu| >= 1, so the piecewise-linear inverse
/// reverses orientation there.
class FoldedFaceError : public Error {
public:
    FoldedFaceError(const std::string& msg, int face) : Error(msg), face_index(face) {}
    int face_index = -1;
};

/// 1 - rho^2 - eta^2 <= 0 after clamping; should be unreachable.
class SingularCoefficientError : public Error {
public:
    using Error::Error;
};

/// Boundary conditions leave the elliptic system singular.
class KernelNotRemovedError : public Error {
public:
    using Error::Error;
};

/// Cayley transform evaluated at its excluded point.
class PoleError : public Error {
public:
    using Error::Error;
};

/// No usable face near the requested point.
class FaceSelectionError : public Error {
public:
    using Error::Error;
};

/// Maximal dilation requested for a field with sup |mu| >= 1.
class UnboundedDilationError : public Error {
public:
    using Error::Error;
};

/// UV data does not cover the mesh vertex set.
class MismatchedVertexCountError : public Error {
public:
    using Error::Error;
};

/// Filesystem failure while reading or writing.
class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace diskconf
