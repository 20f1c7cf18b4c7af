#include "palmroi/error.hpp"

namespace palmroi {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::ConstantImage: return "ConstantImage";
    case ErrorCode::NoForeground: return "NoForeground";
    case ErrorCode::EmptyMask: return "EmptyMask";
    case ErrorCode::ChainTooShort: return "ChainTooShort";
    case ErrorCode::TooFewFingers: return "TooFewFingers";
    case ErrorCode::NoValleyArc: return "NoValleyArc";
    case ErrorCode::TooFewValleys: return "TooFewValleys";
    case ErrorCode::WrongKeyPointCount: return "WrongKeyPointCount";
    case ErrorCode::DegenerateFrame: return "DegenerateFrame";
    case ErrorCode::RoiOutOfImage: return "RoiOutOfImage";
    case ErrorCode::SideMismatch: return "SideMismatch";
    case ErrorCode::InvalidParams: return "InvalidParams";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

}  // namespace palmroi
