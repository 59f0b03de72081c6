// Copyright 2026 canopt developers
// SPDX-License-Identifier: MIT
//
// Error taxonomy for the whole library. Every failure mode carries a stable
// name so the CLI and C API can report it without string-matching messages.

#pragma once

#include <stdexcept>
#include <string>

namespace canopt {

enum class Errc {
    InsufficientMoments,
    InsufficientDepth,
    BoundaryMomentPoint,
    InvalidMomentSequence,
    InvalidZeta,
    DegenerateStep,
    ZeroDenominator,
    AsymmetricInput,
    NonRepresentable,
    NonTerminatingSequence,
    NoFeasiblePoint,
    SingularInformationMatrix,
    InfeasibleBudget,
    NonfinitePower,
    InvalidInput,
    Internal,
};

inline const char* errc_name(Errc c) {
    switch (c) {
        case Errc::InsufficientMoments: return "InsufficientMoments";
        case Errc::InsufficientDepth: return "InsufficientDepth";
        case Errc::BoundaryMomentPoint: return "BoundaryMomentPoint";
        case Errc::InvalidMomentSequence: return "InvalidMomentSequence";
        case Errc::InvalidZeta: return "InvalidZeta";
        case Errc::DegenerateStep: return "DegenerateStep";
        case Errc::ZeroDenominator: return "ZeroDenominator";
        case Errc::AsymmetricInput: return "AsymmetricInput";
        case Errc::NonRepresentable: return "NonRepresentable";
        case Errc::NonTerminatingSequence: return "NonTerminatingSequence";
        case Errc::NoFeasiblePoint: return "NoFeasiblePoint";
        case Errc::SingularInformationMatrix: return "SingularInformationMatrix";
        case Errc::InfeasibleBudget: return "InfeasibleBudget";
        case Errc::NonfinitePower: return "NonfinitePower";
        case Errc::InvalidInput: return "InvalidInput";
        case Errc::Internal: return "Internal";
    }
    return "Internal";
}

class Error : public std::runtime_error {
  public:
    Error(Errc code, const std::string& message)
        : std::runtime_error(std::string(errc_name(code)) + ": " + message), code_(code) {}

    Errc code() const noexcept { return code_; }
    const char* name() const noexcept { return errc_name(code_); }

  private:
    Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& message) {
    throw Error(code, message);
}

}  // namespace canopt
