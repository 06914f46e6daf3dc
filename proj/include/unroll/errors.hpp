#pragma once

#include <stdexcept>
#include <string>

namespace unroll {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct OutOfBounds : Error {
    using Error::Error;
};
struct SingularTransform : Error {
    using Error::Error;
};
struct ImageTooSmall : Error {
    using Error::Error;
};
struct ImageTooNarrow : Error {
    using Error::Error;
};
struct HeightMismatch : Error {
    using Error::Error;
};
struct InsufficientCandidates : Error {
    using Error::Error;
};
struct DegenerateConfiguration : Error {
    using Error::Error;
};
struct NoConsensus : Error {
    using Error::Error;
};
struct NoValidColumn : Error {
    using Error::Error;
};
struct PanoramaTooSmall : Error {
    using Error::Error;
};
struct EmptySequence : Error {
    using Error::Error;
};
struct InvalidGeometry : Error {
    using Error::Error;
};
struct IoError : Error {
    using Error::Error;
};
struct ConfigError : Error {
    using Error::Error;
};

}  // namespace unroll
