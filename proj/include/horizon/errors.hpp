#ifndef HORIZON_ERRORS_HPP
#define HORIZON_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace horizon {

// Base class for all library errors.
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// geometry
struct VerticalLine : Error {
  explicit VerticalLine(const std::string& msg) : Error(msg) {}
};
struct SlopeSingularity : Error {
  explicit SlopeSingularity(const std::string& msg) : Error(msg) {}
};
struct DegenerateProjection : Error {
  explicit DegenerateProjection(const std::string& msg) : Error(msg) {}
};
struct ZeroVector : Error {
  explicit ZeroVector(const std::string& msg) : Error(msg) {}
};

// calibration / dataset
struct BadCalibration : Error {
  explicit BadCalibration(const std::string& msg) : Error(msg) {}
};
struct UnknownSequence : Error {
  explicit UnknownSequence(const std::string& msg) : Error(msg) {}
};
struct FrameMismatch : Error {
  explicit FrameMismatch(const std::string& msg) : Error(msg) {}
};

// metrics / filters
struct EmptyInput : Error {
  explicit EmptyInput(const std::string& msg) : Error(msg) {}
};
struct BadAlpha : Error {
  explicit BadAlpha(const std::string& msg) : Error(msg) {}
};
struct TooShort : Error {
  explicit TooShort(const std::string& msg) : Error(msg) {}
};

// tensors / autodiff
struct ShapeMismatch : Error {
  explicit ShapeMismatch(const std::string& msg) : Error(msg) {}
};
struct NotScalar : Error {
  explicit NotScalar(const std::string& msg) : Error(msg) {}
};
struct NonFinite : Error {
  explicit NonFinite(const std::string& msg) : Error(msg) {}
};

// training
struct DivergedLoss : Error {
  explicit DivergedLoss(const std::string& msg) : Error(msg) {}
};

// io / config
struct IoError : Error {
  explicit IoError(const std::string& msg) : Error(msg) {}
};
struct BadConfig : Error {
  explicit BadConfig(const std::string& msg) : Error(msg) {}
};

}  // namespace horizon

#endif
