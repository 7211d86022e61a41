#pragma once

#include <stdexcept>
#include <string>

namespace mitf {

enum class Errc {
  NoCover,
  ScaleOutOfWindow,
  ResolutionTooCoarse,
  LeakExceeded,
  PVNonconvergent,
  MeanNotZero,
  ScaleTooSmall,
  ZeroTestFunction,
  SymbolBoundsViolated,
  AliasingError,
  WindowTooSmall,
  CoverageGap,
  GridExhausted,
  UnsupportedPair,
  HypothesisViolated,
  NonTerminating,
  AlphaOutOfRegion,
  TailTooLarge,
  DegenerateBeta,
  ConfigInvalid,
  Internal,
};

inline const char* errc_name(Errc c) {
  switch (c) {
    case Errc::NoCover: return "NoCover";
    case Errc::ScaleOutOfWindow: return "ScaleOutOfWindow";
    case Errc::ResolutionTooCoarse: return "ResolutionTooCoarse";
    case Errc::LeakExceeded: return "LeakExceeded";
    case Errc::PVNonconvergent: return "PVNonconvergent";
    case Errc::MeanNotZero: return "MeanNotZero";
    case Errc::ScaleTooSmall: return "ScaleTooSmall";
    case Errc::ZeroTestFunction: return "ZeroTestFunction";
    case Errc::SymbolBoundsViolated: return "SymbolBoundsViolated";
    case Errc::AliasingError: return "AliasingError";
    case Errc::WindowTooSmall: return "WindowTooSmall";
    case Errc::CoverageGap: return "CoverageGap";
    case Errc::GridExhausted: return "GridExhausted";
    case Errc::UnsupportedPair: return "UnsupportedPair";
    case Errc::HypothesisViolated: return "HypothesisViolated";
    case Errc::NonTerminating: return "NonTerminating";
    case Errc::AlphaOutOfRegion: return "AlphaOutOfRegion";
    case Errc::TailTooLarge: return "TailTooLarge";
    case Errc::DegenerateBeta: return "DegenerateBeta";
    case Errc::ConfigInvalid: return "ConfigInvalid";
    case Errc::Internal: return "Internal";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}
  Errc code() const { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void raise(Errc code, const std::string& what) { throw Error(code, what); }

}  // namespace mitf
