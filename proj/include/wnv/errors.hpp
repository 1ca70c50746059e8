#pragma once

#include <stdexcept>
#include <string>

namespace wnv {

// Base class for every error thrown by the toolkit. Catching wnv::Error at
// the CLI boundary is enough to map failures onto exit codes.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// --- schema / file layer -------------------------------------------------

struct UnknownFileError : Error {
  using Error::Error;
};
struct AmbiguousFileError : Error {
  using Error::Error;
};
struct HeaderMismatchError : Error {
  using Error::Error;
};
struct EmptyFileError : Error {
  using Error::Error;
};
struct IoError : Error {
  using Error::Error;
};

// --- pipeline ------------------------------------------------------------

struct MixedSlicesError : Error {
  using Error::Error;
};
struct SampleTooLargeError : Error {
  using Error::Error;
};
struct InconsistentAnchorError : Error {
  using Error::Error;
};

// --- model / estimation ----------------------------------------------------

struct TooFewPointsError : Error {
  using Error::Error;
};
struct InvalidParamsError : Error {
  using Error::Error;
};
struct AllStartsFailedError : Error {
  using Error::Error;
};
struct NotConvergedError : Error {
  using Error::Error;
};
struct DegenerateVarianceError : Error {
  using Error::Error;
};
struct NoAsymptoteError : Error {
  using Error::Error;
};

// --- analytics -------------------------------------------------------------

struct DuplicateWeatherKeyError : Error {
  using Error::Error;
};

// --- CLI -------------------------------------------------------------------

struct UsageError : Error {
  using Error::Error;
};

}  // namespace wnv
