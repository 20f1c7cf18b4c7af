#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace palmroi {

enum class ErrorCode {
  ConstantImage,
  NoForeground,
  EmptyMask,
  ChainTooShort,
  TooFewFingers,
  NoValleyArc,
  TooFewValleys,
  WrongKeyPointCount,
  DegenerateFrame,
  RoiOutOfImage,
  SideMismatch,
  InvalidParams,
  InvalidConfig,
  Io,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace palmroi
