#pragma once

#include <stdexcept>
#include <string>

namespace rankup {

enum class Errc {
  invalid_dimension,
  overflow,
  shape_mismatch,
  empty_batch,
  rank_deficient,
  not_positive_definite,
  singular_update,
  empty_state,
  missing_matrix,
  conditioning_failure,
  invalid_config,
  io,
};

// Broad classes used by the CLI to pick an exit code.
enum class ErrorClass { usage, data, numerical };

inline const char* to_string(Errc code) noexcept {
  switch (code) {
    case Errc::invalid_dimension: return "invalid-dimension";
    case Errc::overflow: return "overflow";
    case Errc::shape_mismatch: return "shape-mismatch";
    case Errc::empty_batch: return "empty-batch";
    case Errc::rank_deficient: return "rank-deficient";
    case Errc::not_positive_definite: return "not-positive-definite";
    case Errc::singular_update: return "singular-update";
    case Errc::empty_state: return "empty-state";
    case Errc::missing_matrix: return "missing-matrix";
    case Errc::conditioning_failure: return "conditioning-failure";
    case Errc::invalid_config: return "invalid-config";
    case Errc::io: return "io";
  }
  return "unknown";
}

inline ErrorClass classify(Errc code) noexcept {
  switch (code) {
    case Errc::invalid_config: return ErrorClass::usage;
    case Errc::not_positive_definite:
    case Errc::singular_update:
    case Errc::conditioning_failure: return ErrorClass::numerical;
    default: return ErrorClass::data;
  }
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  [[nodiscard]] Errc code() const noexcept { return code_; }
  [[nodiscard]] ErrorClass error_class() const noexcept { return classify(code_); }

 private:
  Errc code_;
};

// Raised by the Cholesky factorization; carries the failing pivot.
class NotPositiveDefinite : public Error {
 public:
  explicit NotPositiveDefinite(long pivot)
      : Error(Errc::not_positive_definite,
              "non-positive pivot at index " + std::to_string(pivot)),
        pivot_(pivot) {}

  [[nodiscard]] long pivot() const noexcept { return pivot_; }

 private:
  long pivot_;
};

}  // namespace rankup
