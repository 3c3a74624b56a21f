#pragma once

#include <stdexcept>
#include <string>

namespace mcperturb {

// Base class for all failures raised by this library. Every throw site uses a
// subclass below so callers can distinguish bad inputs from numerical
// breakdowns without string matching.
class ChainError : public std::runtime_error {
 public:
  explicit ChainError(const std::string& what) : std::runtime_error(what) {}
};

// Structural problems with user-supplied data (wrong shapes, bad ranges,
// malformed specs). These map to CLI exit code 2.
class InvalidInputError : public ChainError {
 public:
  using ChainError::ChainError;
};

class DimensionMismatchError : public InvalidInputError {
 public:
  using InvalidInputError::InvalidInputError;
};

class NegativeEntryError : public InvalidInputError {
 public:
  using InvalidInputError::InvalidInputError;
};

class RowSumError : public InvalidInputError {
 public:
  using InvalidInputError::InvalidInputError;
};

class ZeroMassStateError : public InvalidInputError {
 public:
  using InvalidInputError::InvalidInputError;
};

class SupportMismatchError : public InvalidInputError {
 public:
  using InvalidInputError::InvalidInputError;
};

class NegativeRatioError : public InvalidInputError {
 public:
  using InvalidInputError::InvalidInputError;
};

class SpecParseError : public InvalidInputError {
 public:
  using InvalidInputError::InvalidInputError;
};

class ResourceLimitError : public InvalidInputError {
 public:
  using InvalidInputError::InvalidInputError;
};

// Mathematical preconditions that fail on structurally valid data (reducible
// or non-reversible chains, closed gaps). The CLI treats these as unusable
// inputs: exit code 2, like malformed specs.
class PreconditionError : public ChainError {
 public:
  using ChainError::ChainError;
};

class ReducibleChainError : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
};

class NotReversibleError : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
};

class GapClosedError : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
};

class InsufficientReplicatesError : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
};

// Iterative procedures that ran out of budget; unexpected at CLI level.
class NotConvergedError : public ChainError {
 public:
  using ChainError::ChainError;
};

}  // namespace mcperturb
