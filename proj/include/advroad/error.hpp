#pragma once

#include <stdexcept>
#include <string>

namespace advroad {

enum class Errc {
  ShapeMismatch,
  UnknownOp,
  NonScalarLoss,
  NonFinite,
  BehindCamera,
  DegenerateRay,
  PlacementFailure,
  LabelOutOfGrid,
  CorruptFile,
  UnknownVersion,
  Divergence,
  EmptyInput,
  Io,
  InvalidConfig,
};

inline const char* errc_name(Errc c) {
  switch (c) {
    case Errc::ShapeMismatch: return "shape-mismatch";
    case Errc::UnknownOp: return "unknown-op";
    case Errc::NonScalarLoss: return "non-scalar-loss";
    case Errc::NonFinite: return "non-finite";
    case Errc::BehindCamera: return "behind-camera";
    case Errc::DegenerateRay: return "degenerate-ray";
    case Errc::PlacementFailure: return "placement-failure";
    case Errc::LabelOutOfGrid: return "label-out-of-grid";
    case Errc::CorruptFile: return "corrupt-file";
    case Errc::UnknownVersion: return "unknown-version";
    case Errc::Divergence: return "divergence";
    case Errc::EmptyInput: return "empty-input";
    case Errc::Io: return "io";
    case Errc::InvalidConfig: return "invalid-config";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& msg)
      : std::runtime_error(std::string(errc_name(code)) + ": " + msg), code_(code) {}

  Errc code() const { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void raise(Errc code, const std::string& msg) { throw Error(code, msg); }

}  // namespace advroad
