#include "sftdim/suspension.hpp"

#include <cmath>

namespace sftdim {

namespace {

void require_positive(const LocallyConstantFn& fn, const char* which) {
  if (!fn.strictly_positive())
    throw Error(ErrorCode::NonPositiveFunction,
                std::string(which) + " must be strictly positive on every admissible word");
}

}  // namespace

FlowStats flow_stats(const MarkovMeasure& m, const LocallyConstantFn& roof,
                     const LocallyConstantFn& fu, const LocallyConstantFn* fs) {
  require_positive(roof, "roof function");
  require_positive(fu, "F^u");
  if (fs) require_positive(*fs, "F^s");

  FlowStats s;
  s.a = shift_entropy(m);
  s.b = integrate(m, fu);
  s.roof_mean = integrate(m, roof);
  s.h_flow = s.a / s.roof_mean;
  s.lambda = s.b / s.roof_mean;
  s.dim = 1.0 + 2.0 * s.h_flow / s.lambda;
  s.fs_mean = fs ? integrate(m, *fs) : s.b;
  s.entropy_exceeds_exponent = s.h_flow > s.lambda + 1e-12;
  s.fs_mean_mismatch = std::fabs(s.fs_mean - s.b) > 1e-9 * std::fmax(1.0, std::fabs(s.b));
  return s;
}

DimTwoReport check_dim_two(const FlowStats& stats, double tol) {
  DimTwoReport r;
  r.residual_ratio = stats.a / stats.b - 0.5;
  r.residual_b2a = stats.b - 2.0 * stats.a;
  r.is_dim_two = std::fabs(r.residual_ratio) <= tol;
  return r;
}

}  // namespace sftdim
