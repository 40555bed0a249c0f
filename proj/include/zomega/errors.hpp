#pragma once

// Error taxonomy. Two roots:
//   ContractError  - caller broke a documented precondition; the CLI maps
//                    these to exit code 2.
//   NumericalError - inputs were legal but the computation could not reach
//                    its accuracy or convergence target; CLI exit code 1.

#include <stdexcept>
#include <string>

namespace zomega {

struct ContractError : std::invalid_argument {
  explicit ContractError(const std::string& what) : std::invalid_argument(what) {}
};

struct NumericalError : std::runtime_error {
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

// --- contract violations ---

struct PoleAt1 : ContractError {
  PoleAt1() : ContractError("zeta evaluation requested at the pole s = 1") {}
};

struct DomainError : ContractError {
  explicit DomainError(const std::string& what) : ContractError(what) {}
};

struct CutoffMismatch : ContractError {
  explicit CutoffMismatch(const std::string& what) : ContractError(what) {}
};

struct NotSuperlinear : ContractError {
  explicit NotSuperlinear(const std::string& what) : ContractError(what) {}
};

struct PreconditionQ : ContractError {
  explicit PreconditionQ(const std::string& what) : ContractError(what) {}
};

struct SigmaOutOfRange : ContractError {
  explicit SigmaOutOfRange(const std::string& what) : ContractError(what) {}
};

// --- numerical failures ---

struct PrecisionUnreachable : NumericalError {
  explicit PrecisionUnreachable(const std::string& what) : NumericalError(what) {}
};

struct TruncationUnsound : NumericalError {
  explicit TruncationUnsound(const std::string& what) : NumericalError(what) {}
};

struct NoRoot : NumericalError {
  explicit NoRoot(const std::string& what) : NumericalError(what) {}
};

struct NoAdmissibleM : NumericalError {
  explicit NoAdmissibleM(const std::string& what) : NumericalError(what) {}
};

struct RegimeTooSmall : NumericalError {
  explicit RegimeTooSmall(const std::string& what) : NumericalError(what) {}
};

struct QuadratureNonConverged : NumericalError {
  explicit QuadratureNonConverged(const std::string& what) : NumericalError(what) {}
};

struct OverflowSentinel : NumericalError {
  explicit OverflowSentinel(const std::string& what) : NumericalError(what) {}
};

}  // namespace zomega
