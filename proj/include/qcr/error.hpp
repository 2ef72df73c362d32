#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace qcr {

/// Failure categories raised by the engine. Every throw site picks exactly one.
enum class ErrorKind {
  InvalidDimension,
  Shape,
  Index,
  Margin,
  Evaluation,
  ImmersionFailure,
  NotNormal,
  Drift,
  Inapplicable,
  Normalization,
  NonConstantRank,
  NotTotallyReal,
  ProjectionDomain,
  Membership,
  Configuration,
  Domain,
  Parse,
  UnknownScenario,
};

std::string_view to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidDimension: return "invalid-dimension";
    case ErrorKind::Shape: return "shape";
    case ErrorKind::Index: return "index";
    case ErrorKind::Margin: return "margin";
    case ErrorKind::Evaluation: return "evaluation";
    case ErrorKind::ImmersionFailure: return "immersion-failure";
    case ErrorKind::NotNormal: return "not-normal";
    case ErrorKind::Drift: return "drift";
    case ErrorKind::Inapplicable: return "inapplicable";
    case ErrorKind::Normalization: return "normalization";
    case ErrorKind::NonConstantRank: return "non-constant-rank";
    case ErrorKind::NotTotallyReal: return "not-totally-real";
    case ErrorKind::ProjectionDomain: return "projection-domain";
    case ErrorKind::Membership: return "membership";
    case ErrorKind::Configuration: return "configuration";
    case ErrorKind::Domain: return "domain";
    case ErrorKind::Parse: return "parse";
    case ErrorKind::UnknownScenario: return "unknown-scenario";
  }
  return "unknown";
}

}  // namespace qcr
