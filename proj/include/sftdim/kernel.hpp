#pragma once

#include <cstdint>
#include <vector>

#include "sftdim/markov.hpp"

namespace sftdim {

// Flattened chain data consumed by the sampling kernels. Successor draws use
// per-state compressed cumulative tables padded to the full alphabet width
// (padding entries have cum = 2.0 and are never selected); observables are
// dense pair tables indexed (from * n + to) in forward orientation.
//
// Both kernel variants read these exact arrays, which is what makes their
// outputs bit-identical.
struct ChainTables {
  int n = 0;

  std::vector<double> cum_init;   // n entries, cumulative of v
  std::vector<int32_t> sym_init;  // n entries
  int32_t len_init = 0;

  std::vector<double> cum_fwd;    // n*n padded
  std::vector<int32_t> sym_fwd;   // n*n padded
  std::vector<int32_t> len_fwd;   // n

  std::vector<double> cum_bwd;    // reversed chain, same layout
  std::vector<int32_t> sym_bwd;
  std::vector<int32_t> len_bwd;

  std::vector<double> g_pair;     // ln P_ij on admissible pairs, 0 elsewhere
  std::vector<double> fu_pair;    // depth <= 2 expansion, 0 off-support
  std::vector<double> fs_pair;
  std::vector<double> ln_v;       // n

  double min_fu = 0.0;            // min over admissible pairs
  double min_fs = 0.0;

  // fu/fs may be null when only path symbols are needed (sample_path).
  static ChainTables build(const MarkovMeasure& m, const LocallyConstantFn* fu,
                           const LocallyConstantFn* fs);
};

// Categorical draw shared by every sampler: count of cumulative entries at or
// below u, clamped to the admissible row length.
inline int select_from_cum(const double* cum, const int32_t* sym, int len, double u) {
  int c = 0;
  for (int k = 0; k < len; ++k) c += (cum[k] <= u) ? 1 : 0;
  if (c >= len) c = len - 1;
  return sym[c];
}

enum class KernelKind { Auto, Scalar, Avx2 };

struct KernelOptions {
  KernelKind kind = KernelKind::Auto;
  int threads = 0;  // 0 = hardware concurrency
};

bool avx2_available();
KernelKind resolve_kernel(KernelKind requested);  // Auto -> best available

// Mode A: raw Birkhoff sums snapshotted at fixed indices. For sample s and
// grid entry g (value n), with X/Y the observable sums of the two-sided
// stationary path:
//   sg_f = sum_{i=0}^{n-1} ln P(w_i, w_{i+1})        (so X_n^u = -sg_f)
//   sf_f = sum_{i=0}^{n-1} Fu(w_i, w_{i+1})          (Y_n^u)
//   sg_b = sum_{k=1}^{n}   ln P(w_{-k}, w_{-k+1})    (X_n^s = -sg_b)
//   sf_b = Fs(w_0, w_1) + sum_{k=1}^{n-1} Fs(w_{-k}, w_{-k+1})   (Y_n^s)
// Output arrays are indexed [g * samples + s].
struct SnapshotRequest {
  const ChainTables* tables = nullptr;
  std::vector<int32_t> n_grid;  // strictly increasing, >= 1
  int64_t samples = 0;
  uint64_t seed = 0;
};
struct SnapshotBuffers {
  double* sg_f = nullptr;
  double* sf_f = nullptr;
  double* sg_b = nullptr;
  double* sf_b = nullptr;
};
void run_snapshots(const SnapshotRequest& req, SnapshotBuffers out,
                   const KernelOptions& opts = {});

// Mode B: stopping times against increasing thresholds thr[g] (already
// tolerance-adjusted), with the log cylinder mass of [w]_{-n2}^{n1}:
//   n1[g] = min m >= 0 with sum_{k=0}^{m} Fu(w_k, w_{k+1}) >= thr[g]
//   n2[g] = min m >= 0 with Fs(w_0,w_1) + sum_{k=1}^{m} Fs(w_{-k}, w_{-k+1}) >= thr[g]
//   ln_mu[g] = ln v_{w_{-n2}} + sum_{i=-n2}^{n1-1} ln P(w_i, w_{i+1})
struct StoppingRequest {
  const ChainTables* tables = nullptr;
  std::vector<double> thresholds;  // strictly increasing
  int64_t samples = 0;
  uint64_t seed = 0;
};
struct StoppingBuffers {
  int32_t* n1 = nullptr;
  int32_t* n2 = nullptr;
  double* ln_mu = nullptr;
};
void run_stopping(const StoppingRequest& req, StoppingBuffers out,
                  const KernelOptions& opts = {});

// Reference (scalar) and AVX2 entry points for one contiguous block of
// samples; exposed for the equivalence tests. `stride` is the total sample
// count used for output indexing.
void snapshots_scalar(const ChainTables& t, const int32_t* grid, int g_count,
                      int64_t s_begin, int64_t s_end, int64_t stride, uint64_t seed,
                      SnapshotBuffers out);
void stopping_scalar(const ChainTables& t, const double* thr, int g_count,
                     int64_t s_begin, int64_t s_end, int64_t stride, uint64_t seed,
                     int64_t step_cap, StoppingBuffers out);

}  // namespace sftdim
