#include <algorithm>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

#include "sftdim/kernel.hpp"

namespace sftdim {

#if defined(SFTDIM_HAVE_AVX2_TU)
void snapshots_avx2(const ChainTables& t, const int32_t* grid, int g_count,
                    int64_t s_begin, int64_t s_end, int64_t stride, uint64_t seed,
                    SnapshotBuffers out);
void stopping_avx2(const ChainTables& t, const double* thr, int g_count,
                   int64_t s_begin, int64_t s_end, int64_t stride, uint64_t seed,
                   int64_t step_cap, StoppingBuffers out);
#endif

bool avx2_available() {
#if defined(SFTDIM_HAVE_AVX2_TU)
  return __builtin_cpu_supports("avx2") != 0;
#else
  return false;
#endif
}

KernelKind resolve_kernel(KernelKind requested) {
  if (requested == KernelKind::Auto)
    return avx2_available() ? KernelKind::Avx2 : KernelKind::Scalar;
  if (requested == KernelKind::Avx2 && !avx2_available())
    throw Error(ErrorCode::Schema, "AVX2 kernel requested but not available on this host");
  return requested;
}

namespace {

int worker_count(const KernelOptions& opts, int64_t samples) {
  int hw = static_cast<int>(std::thread::hardware_concurrency());
  int threads = opts.threads > 0 ? opts.threads : (hw > 0 ? hw : 1);
  // Blocks are multiples of 8 lanes; tiny batches run on one thread.
  int64_t max_useful = (samples + 63) / 64;
  return static_cast<int>(std::max<int64_t>(1, std::min<int64_t>(threads, max_useful)));
}

// Runs fn(begin, end) over a partition of [0, samples) into 8-aligned blocks.
template <typename Fn>
void parallel_blocks(int64_t samples, int threads, Fn&& fn) {
  if (threads <= 1) {
    fn(static_cast<int64_t>(0), samples);
    return;
  }
  int64_t block = ((samples + threads - 1) / threads + 7) / 8 * 8;
  std::vector<std::thread> pool;
  std::exception_ptr first_error;
  std::mutex err_mutex;
  for (int w = 0; w < threads; ++w) {
    int64_t begin = std::min<int64_t>(samples, static_cast<int64_t>(w) * block);
    int64_t end = std::min<int64_t>(samples, begin + block);
    if (begin >= end) break;
    pool.emplace_back([&, begin, end]() {
      try {
        fn(begin, end);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

void check_grid(const std::vector<int32_t>& grid) {
  if (grid.empty()) throw Error(ErrorCode::BadGrid, "empty index grid");
  int32_t prev = 0;
  for (int32_t n : grid) {
    if (n <= prev) throw Error(ErrorCode::BadGrid, "index grid must be strictly increasing and >= 1");
    prev = n;
  }
}

}  // namespace

void run_snapshots(const SnapshotRequest& req, SnapshotBuffers out, const KernelOptions& opts) {
  check_grid(req.n_grid);
  if (req.samples < 0) throw Error(ErrorCode::Schema, "negative sample count");
  if (req.samples == 0) return;
  KernelKind kind = resolve_kernel(opts.kind);
  int threads = worker_count(opts, req.samples);
  const ChainTables& t = *req.tables;
  const int g = static_cast<int>(req.n_grid.size());
  parallel_blocks(req.samples, threads, [&](int64_t begin, int64_t end) {
#if defined(SFTDIM_HAVE_AVX2_TU)
    if (kind == KernelKind::Avx2) {
      snapshots_avx2(t, req.n_grid.data(), g, begin, end, req.samples, req.seed, out);
      return;
    }
#endif
    snapshots_scalar(t, req.n_grid.data(), g, begin, end, req.samples, req.seed, out);
  });
}

void run_stopping(const StoppingRequest& req, StoppingBuffers out, const KernelOptions& opts) {
  if (req.thresholds.empty()) throw Error(ErrorCode::BadGrid, "empty threshold grid");
  for (size_t i = 1; i < req.thresholds.size(); ++i)
    if (!(req.thresholds[i] > req.thresholds[i - 1]))
      throw Error(ErrorCode::BadGrid, "thresholds must be strictly increasing");
  if (req.samples < 0) throw Error(ErrorCode::Schema, "negative sample count");
  if (req.samples == 0) return;
  const ChainTables& t = *req.tables;
  if (!(t.min_fu > 0.0) || !(t.min_fs > 0.0))
    throw Error(ErrorCode::NonPositiveFunction,
                "stopping sums require strictly positive F^u and F^s");

  double thr_max = req.thresholds.back();
  double min_step = std::fmin(t.min_fu, t.min_fs);
  int64_t step_cap =
      static_cast<int64_t>(std::ceil(std::fmax(thr_max, 0.0) / min_step)) + 16;

  KernelKind kind = resolve_kernel(opts.kind);
  int threads = worker_count(opts, req.samples);
  const int g = static_cast<int>(req.thresholds.size());
  parallel_blocks(req.samples, threads, [&](int64_t begin, int64_t end) {
#if defined(SFTDIM_HAVE_AVX2_TU)
    if (kind == KernelKind::Avx2) {
      stopping_avx2(t, req.thresholds.data(), g, begin, end, req.samples, req.seed, step_cap, out);
      return;
    }
#endif
    stopping_scalar(t, req.thresholds.data(), g, begin, end, req.samples, req.seed, step_cap, out);
  });
}

}  // namespace sftdim
