#pragma once

#include <stdexcept>
#include <string>

namespace sftdim {

enum class ErrorCode {
  StrandedSymbol,    // adjacency row or column with no 1
  BadTheta,          // metric base outside (0,1)
  Inadmissible,      // word/cycle violates the adjacency matrix
  WordTooShort,      // path cannot support the requested computation
  SupportMismatch,   // sign pattern of P disagrees with A
  RowSum,            // stochastic row deviates from 1 beyond tolerance
  NotMixing,         // no power of A is entrywise positive
  NonPositiveFunction,
  Infeasible,        // Bowen root at or below 1/2, no dimension-2 measure
  DegenerateLevelSet,
  Schema,            // malformed config / bad arguments
  BadGrid,
  Numeric,           // internal numerical failure
  Io,
};

const char* error_code_name(ErrorCode code);

// Single structured error type. `index_i`/`index_j` are 1-based symbol or
// row/column indices when the code refers to a matrix entry; `value` carries
// a numeric payload (the Bowen root for Infeasible).
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string msg, int i = 0, int j = 0, double value = 0.0)
      : std::runtime_error(std::move(msg)), code_(code), i_(i), j_(j), value_(value) {}

  ErrorCode code() const { return code_; }
  int index_i() const { return i_; }
  int index_j() const { return j_; }
  double value() const { return value_; }

 private:
  ErrorCode code_;
  int i_;
  int j_;
  double value_;
};

}  // namespace sftdim
