// Reference kernels. The AVX2 variants in avx2.cpp reproduce these loops
// lane-per-sample; every arithmetic step here is ordered so that both
// implementations produce bit-identical output (see tests/test_kernel.cpp).

#include <cstddef>

#include "sftdim/kernel.hpp"
#include "sftdim/rng.hpp"

namespace sftdim {

void snapshots_scalar(const ChainTables& t, const int32_t* grid, int g_count,
                      int64_t s_begin, int64_t s_end, int64_t stride, uint64_t seed,
                      SnapshotBuffers out) {
  const int n = t.n;
  const int32_t n_max = grid[g_count - 1];
  for (int64_t s = s_begin; s < s_end; ++s) {
    UniformStream fwd(seed, 2 * static_cast<uint64_t>(s));
    UniformStream bwd(seed, 2 * static_cast<uint64_t>(s) + 1);

    int w0 = select_from_cum(t.cum_init.data(), t.sym_init.data(), t.len_init, fwd.next());
    int cur = w0;
    int w1 = w0;
    double cg = 0.0, cf = 0.0;
    int gi = 0;
    for (int32_t i = 0; i < n_max; ++i) {
      double u = fwd.next();
      int nxt = select_from_cum(t.cum_fwd.data() + static_cast<size_t>(cur) * n,
                                t.sym_fwd.data() + static_cast<size_t>(cur) * n,
                                t.len_fwd[static_cast<size_t>(cur)], u);
      if (i == 0) w1 = nxt;
      cg += t.g_pair[static_cast<size_t>(cur) * n + nxt];
      cf += t.fu_pair[static_cast<size_t>(cur) * n + nxt];
      if (i + 1 == grid[gi]) {
        out.sg_f[static_cast<size_t>(gi) * stride + s] = cg;
        out.sf_f[static_cast<size_t>(gi) * stride + s] = cf;
        ++gi;
      }
      cur = nxt;
    }

    cur = w0;
    double cgb = 0.0;
    double cfb = t.fs_pair[static_cast<size_t>(w0) * n + w1];
    gi = 0;
    for (int32_t k = 1; k <= n_max; ++k) {
      double u = bwd.next();
      int prv = select_from_cum(t.cum_bwd.data() + static_cast<size_t>(cur) * n,
                                t.sym_bwd.data() + static_cast<size_t>(cur) * n,
                                t.len_bwd[static_cast<size_t>(cur)], u);
      cgb += t.g_pair[static_cast<size_t>(prv) * n + cur];
      if (k == grid[gi]) {
        out.sg_b[static_cast<size_t>(gi) * stride + s] = cgb;
        out.sf_b[static_cast<size_t>(gi) * stride + s] = cfb;
        ++gi;
      }
      cfb += t.fs_pair[static_cast<size_t>(prv) * n + cur];
      cur = prv;
    }
  }
}

void stopping_scalar(const ChainTables& t, const double* thr, int g_count,
                     int64_t s_begin, int64_t s_end, int64_t stride, uint64_t seed,
                     int64_t step_cap, StoppingBuffers out) {
  const int n = t.n;
  for (int64_t s = s_begin; s < s_end; ++s) {
    UniformStream fwd(seed, 2 * static_cast<uint64_t>(s));
    UniformStream bwd(seed, 2 * static_cast<uint64_t>(s) + 1);

    int w0 = select_from_cum(t.cum_init.data(), t.sym_init.data(), t.len_init, fwd.next());
    int cur = w0;
    int w1 = w0;
    double cg = 0.0, cf = 0.0;
    int gf = 0;
    for (int64_t i = 0; gf < g_count; ++i) {
      if (i > step_cap) throw Error(ErrorCode::Numeric, "stopping kernel exceeded step cap");
      double u = fwd.next();
      int nxt = select_from_cum(t.cum_fwd.data() + static_cast<size_t>(cur) * n,
                                t.sym_fwd.data() + static_cast<size_t>(cur) * n,
                                t.len_fwd[static_cast<size_t>(cur)], u);
      if (i == 0) w1 = nxt;
      double new_cf = cf + t.fu_pair[static_cast<size_t>(cur) * n + nxt];
      while (gf < g_count && new_cf >= thr[gf]) {
        out.n1[static_cast<size_t>(gf) * stride + s] = static_cast<int32_t>(i);
        out.ln_mu[static_cast<size_t>(gf) * stride + s] = cg;  // transitions 0..i-1
        ++gf;
      }
      cg += t.g_pair[static_cast<size_t>(cur) * n + nxt];
      cf = new_cf;
      cur = nxt;
    }

    cur = w0;
    double cgb = 0.0;
    double cfb = t.fs_pair[static_cast<size_t>(w0) * n + w1];
    int gb = 0;
    while (gb < g_count && cfb >= thr[gb]) {
      out.n2[static_cast<size_t>(gb) * stride + s] = 0;
      out.ln_mu[static_cast<size_t>(gb) * stride + s] += t.ln_v[static_cast<size_t>(w0)];
      ++gb;
    }
    for (int64_t k = 1; gb < g_count; ++k) {
      if (k > step_cap) throw Error(ErrorCode::Numeric, "stopping kernel exceeded step cap");
      double u = bwd.next();
      int prv = select_from_cum(t.cum_bwd.data() + static_cast<size_t>(cur) * n,
                                t.sym_bwd.data() + static_cast<size_t>(cur) * n,
                                t.len_bwd[static_cast<size_t>(cur)], u);
      cgb += t.g_pair[static_cast<size_t>(prv) * n + cur];
      cfb += t.fs_pair[static_cast<size_t>(prv) * n + cur];
      while (gb < g_count && cfb >= thr[gb]) {
        out.n2[static_cast<size_t>(gb) * stride + s] = static_cast<int32_t>(k);
        out.ln_mu[static_cast<size_t>(gb) * stride + s] +=
            cgb + t.ln_v[static_cast<size_t>(prv)];
        ++gb;
      }
      cur = prv;
    }
  }
}

}  // namespace sftdim
