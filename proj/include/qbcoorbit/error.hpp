#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace qbc {

enum class Errc {
  GroupMismatch,
  NonPositiveWeight,
  RadiusTooLarge,
  ShapeMismatch,
  LengthMismatch,
  InvalidExponent,
  NotAFrame,
  NeumannStalled,
  NotDense,
  NotContractive,
  MaxIterExceeded,
  CountTooLarge,
  InvalidFitWindow,
  IoError,
  BadParams,
};

constexpr std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::GroupMismatch: return "GroupMismatch";
    case Errc::NonPositiveWeight: return "NonPositiveWeight";
    case Errc::RadiusTooLarge: return "RadiusTooLarge";
    case Errc::ShapeMismatch: return "ShapeMismatch";
    case Errc::LengthMismatch: return "LengthMismatch";
    case Errc::InvalidExponent: return "InvalidExponent";
    case Errc::NotAFrame: return "NotAFrame";
    case Errc::NeumannStalled: return "NeumannStalled";
    case Errc::NotDense: return "NotDense";
    case Errc::NotContractive: return "NotContractive";
    case Errc::MaxIterExceeded: return "MaxIterExceeded";
    case Errc::CountTooLarge: return "CountTooLarge";
    case Errc::InvalidFitWindow: return "InvalidFitWindow";
    case Errc::IoError: return "IoError";
    case Errc::BadParams: return "BadParams";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

/// Raised when the frame operator is numerically singular; carries the bounds
/// that were measured so callers can report them.
class NotAFrameError : public Error {
 public:
  NotAFrameError(double lower, double upper, const std::string& what)
      : Error(Errc::NotAFrame, what), lower_(lower), upper_(upper) {}

  double lower() const noexcept { return lower_; }
  double upper() const noexcept { return upper_; }

 private:
  double lower_;
  double upper_;
};

}  // namespace qbc
