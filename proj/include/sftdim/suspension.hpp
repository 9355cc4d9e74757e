#pragma once

#include "sftdim/markov.hpp"

namespace sftdim {

// Invariants of the suspension flow built from (measure, roof, Fu). The flow
// itself is never time-stepped; every quantity is an integral:
//   h_flow = h / int(roof)        (Abramov)
//   lambda = int(Fu) / int(roof)
//   dim    = 1 + 2 h_flow / lambda
//   a      = shift entropy (= -int G), b = int(Fu)
struct FlowStats {
  double h_flow = 0.0;
  double lambda = 0.0;
  double dim = 0.0;
  double a = 0.0;
  double b = 0.0;
  double roof_mean = 0.0;
  double fs_mean = 0.0;
  // Diagnostics: symbolic inputs can violate the flow inequality h <= lambda
  // (possible only when dim > 3), and a user Fs need not integrate to b.
  bool entropy_exceeds_exponent = false;
  bool fs_mean_mismatch = false;
};

// roof and fu must be strictly positive (NonPositiveFunction otherwise).
// fs defaults to fu when null; its integral is only validated, never forced.
FlowStats flow_stats(const MarkovMeasure& m, const LocallyConstantFn& roof,
                     const LocallyConstantFn& fu,
                     const LocallyConstantFn* fs = nullptr);

struct DimTwoReport {
  bool is_dim_two = false;
  double residual_ratio = 0.0;  // a/b - 1/2
  double residual_b2a = 0.0;    // b - 2a
};

DimTwoReport check_dim_two(const FlowStats& stats, double tol);

}  // namespace sftdim
