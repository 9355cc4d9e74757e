#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "sftdim/kernel.hpp"
#include "sftdim/markov.hpp"

namespace sftdim {

// Centered Birkhoff partial sums along one two-sided path, indexed n = 0..n_max:
//   xu[n] = -sum_{i=0}^{n-1} G(shift^i w)  - n a
//   yu[n] =  sum_{i=0}^{n-1} Fu(shift^i w) - n b
//   xs[n] = -sum_{i=1}^{n}   G(shift^-i w) - n a
//   ys[n] =  sum_{i=0}^{n-1} Fs(shift^-i w) - n b
// with a = shift entropy, b = int Fu.
struct CenteredObs {
  std::vector<double> xu, yu, xs, ys;
};

CenteredObs centered_sums(const MarkovMeasure& m, const LocallyConstantFn& fu,
                          const LocallyConstantFn& fs, const Word& path, int n_max);

struct LagPolicy {
  double increment_tol = 1e-12;  // stop when ||C_k + C_k^T||_F drops below
  int max_lag = 10000;           // hard cap for pathological inputs
};

// Exact 2x2 asymptotic covariance of the centered pair (-G - a, Fu - b),
// summed over lags via matrix powers of P; no sampling involved.
struct CovarianceQ {
  double q[2][2] = {{0.0, 0.0}, {0.0, 0.0}};
  int lag_used = 0;
  double truncation_residual = 0.0;
  double det() const { return q[0][0] * q[1][1] - q[0][1] * q[1][0]; }
  double trace() const { return q[0][0] + q[1][1]; }
};

enum class ObsSide { Unstable, Stable };

// fu must have depth <= 2 (block-recode first otherwise). The Stable side
// evaluates the backward observables under the reversed chain; equality of
// the two sides is not asserted.
CovarianceQ green_kubo_covariance(const MarkovMeasure& m, const LocallyConstantFn& fu,
                                  const LagPolicy& policy = {},
                                  ObsSide side = ObsSide::Unstable,
                                  const LocallyConstantFn* fs = nullptr);

// Periodic-orbit sums of fn - mean over all orbits up to l_max. Degenerate
// means every sum vanishes to 1e-10 (the numeric face of fn - mean being a
// coboundary); otherwise the first non-vanishing orbit is the witness.
struct CoboundaryVerdict {
  bool is_degenerate = true;
  std::optional<Cycle> witness;
  double witness_sum = 0.0;
  double max_abs_sum = 0.0;
};

CoboundaryVerdict coboundary_test(const Sft& sft, const LocallyConstantFn& fn,
                                  double mean, int l_max);

// Rank of the span of the per-orbit vectors (S(-G) - a|c|, S(Fu) - b|c|)
// plus the determinant test on the exact Q.
struct NonsingularityReport {
  double det_q = 0.0;
  int rank_cycles = 0;
  bool nonsingular = false;
  CovarianceQ q;
};

NonsingularityReport nonsingularity_check(const MarkovMeasure& m,
                                          const LocallyConstantFn& fu, int l_max);

// Raw per-sample sums at the grid indices (see kernel.hpp for the exact
// definition of the four arrays). Used by the harness and by covariance
// cross-checks.
struct PathSnapshots {
  std::vector<int32_t> n_grid;
  int64_t samples = 0;
  std::vector<double> sg_f, sf_f, sg_b, sf_b;  // [g * samples + s]
};

PathSnapshots simulate_snapshots(const MarkovMeasure& m, const LocallyConstantFn& fu,
                                 const LocallyConstantFn& fs,
                                 const std::vector<int32_t>& n_grid, int64_t samples,
                                 uint64_t seed, const KernelOptions& opts = {});

// Tail events E_n^v = { X_n^v <= n a - D sqrt(n)  and  Y_n^v >= n b + C~ },
// estimated over seeded stationary paths, against the bivariate-normal
// prediction rho_pred(n) = P[N(0, nQ) in {x <= -D sqrt(n), y >= C~}].
struct TailEventStats {
  std::vector<int32_t> n_grid;
  std::vector<double> freq_u, freq_s, freq_joint;
  std::vector<double> rho_pred;
  int64_t samples = 0;
  double d = 1.5;
  double c_tilde = 5.0;
  bool q_near_singular = false;  // warning, not an error
};

TailEventStats asip_harness(const MarkovMeasure& m, const LocallyConstantFn& fu,
                            const LocallyConstantFn& fs,
                            const std::vector<int32_t>& n_grid, int64_t samples,
                            double d, double c_tilde, uint64_t seed,
                            const KernelOptions& opts = {});

// P[X <= x_hi, Y >= y_lo] for (X,Y) ~ N(0, Q); handles rank-deficient Q.
double bivariate_normal_tail(const CovarianceQ& q, double x_hi, double y_lo);

}  // namespace sftdim
