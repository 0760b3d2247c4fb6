#pragma once

#include <stdexcept>
#include <string>

namespace clra {

// Base class for all library errors. Every failure mode raised by the
// library derives from this, so callers can catch one type at the boundary.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed argument that no specific category below covers (bad stride,
// shape mismatch, empty input, ...).
class InvalidInput : public Error {
public:
    using Error::Error;
};

// Requested truncation rank outside [1, rank bound of the factorization].
class InvalidRank : public Error {
public:
    using Error::Error;
};

// Patch size exceeds one of the image dimensions.
class PatchTooLarge : public Error {
public:
    using Error::Error;
};

// Patch anchor out of bounds for the stated image shape.
class InvalidPosition : public Error {
public:
    using Error::Error;
};

// An operation that needs at least one patch received an empty cluster.
class EmptyCluster : public Error {
public:
    using Error::Error;
};

// k-means asked for more clusters than there are points.
class TooManyClusters : public Error {
public:
    using Error::Error;
};

// A metric was evaluated over a mask that selects no pixels.
class EmptyRegion : public Error {
public:
    using Error::Error;
};

// IoU of two empty masks (0/0).
class UndefinedIoU : public Error {
public:
    using Error::Error;
};

// Relative error against an all-zero reference, and similar 0-denominators.
class DegenerateRegion : public Error {
public:
    using Error::Error;
};

// Image too small for the requested operation (e.g. gradient stencil).
class ImageTooSmall : public Error {
public:
    using Error::Error;
};

// Reconstruction found a pixel covered by no patch.
class CoverageGap : public Error {
public:
    using Error::Error;
};

// Filesystem / decode / encode failure.
class IoError : public Error {
public:
    using Error::Error;
};

// Archive bytes violate the container format.
class FormatError : public Error {
public:
    using Error::Error;
};

// Inconsistent or unsupported run configuration.
class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace clra
