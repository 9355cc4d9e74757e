// AVX2 lane-per-sample variants of the reference kernels in scalar.cpp.
// Eight sample paths advance in lockstep, one per 32-bit lane; doubles run
// in two 4-lane halves. Per-lane arithmetic order matches the scalar code
// exactly, so outputs are bit-identical (equivalence-tested).

#if defined(__AVX2__)

#include <immintrin.h>

#include <cstddef>
#include <limits>

#include "sftdim/kernel.hpp"
#include "sftdim/rng.hpp"

namespace sftdim {

namespace {

inline void mulhilo8(__m256i a, __m256i m, __m256i& hi, __m256i& lo) {
  __m256i even = _mm256_mul_epu32(a, m);
  __m256i odd = _mm256_mul_epu32(_mm256_srli_epi64(a, 32), m);
  lo = _mm256_blend_epi32(even, _mm256_slli_epi64(odd, 32), 0xAA);
  hi = _mm256_blend_epi32(_mm256_srli_epi64(even, 32), odd, 0xAA);
}

// One Philox4x32-10 block for 8 lanes sharing a block index.
inline void philox_block8(uint64_t blk, __m256i stream_lo, __m256i stream_hi, uint64_t seed,
                          __m256i out[4]) {
  __m256i c0 = _mm256_set1_epi32(static_cast<int>(static_cast<uint32_t>(blk)));
  __m256i c1 = _mm256_set1_epi32(static_cast<int>(static_cast<uint32_t>(blk >> 32)));
  __m256i c2 = stream_lo;
  __m256i c3 = stream_hi;
  __m256i k0 = _mm256_set1_epi32(static_cast<int>(static_cast<uint32_t>(seed)));
  __m256i k1 = _mm256_set1_epi32(static_cast<int>(static_cast<uint32_t>(seed >> 32)));
  const __m256i m0 = _mm256_set1_epi32(static_cast<int>(Philox4x32::kMul0));
  const __m256i m1 = _mm256_set1_epi32(static_cast<int>(Philox4x32::kMul1));
  const __m256i w0 = _mm256_set1_epi32(static_cast<int>(Philox4x32::kWeyl0));
  const __m256i w1 = _mm256_set1_epi32(static_cast<int>(Philox4x32::kWeyl1));
  for (int r = 0; r < 10; ++r) {
    __m256i hi0, lo0, hi1, lo1;
    mulhilo8(c0, m0, hi0, lo0);
    mulhilo8(c2, m1, hi1, lo1);
    __m256i n0 = _mm256_xor_si256(_mm256_xor_si256(hi1, c1), k0);
    __m256i n2 = _mm256_xor_si256(_mm256_xor_si256(hi0, c3), k1);
    c0 = n0;
    c1 = lo1;
    c2 = n2;
    c3 = lo0;
    k0 = _mm256_add_epi32(k0, w0);
    k1 = _mm256_add_epi32(k1, w1);
  }
  out[0] = c0;
  out[1] = c1;
  out[2] = c2;
  out[3] = c3;
}

// Buffered uniform stream for 8 lanes (one direction of one sample group).
struct VecStream {
  __m256i stream_lo, stream_hi;
  uint64_t seed = 0;
  uint64_t blk = 0;
  __m256i buf[4];
  int pos = 4;

  void init(uint64_t seed_in, int64_t first_sample, int dir) {
    seed = seed_in;
    alignas(32) int32_t lo[8];
    alignas(32) int32_t hi[8];
    for (int l = 0; l < 8; ++l) {
      uint64_t stream = 2 * static_cast<uint64_t>(first_sample + l) + static_cast<uint64_t>(dir);
      lo[l] = static_cast<int32_t>(static_cast<uint32_t>(stream));
      hi[l] = static_cast<int32_t>(static_cast<uint32_t>(stream >> 32));
    }
    stream_lo = _mm256_load_si256(reinterpret_cast<const __m256i*>(lo));
    stream_hi = _mm256_load_si256(reinterpret_cast<const __m256i*>(hi));
    blk = 0;
    pos = 4;
  }

  void next(__m256d& u_lo, __m256d& u_hi) {
    if (pos == 4) {
      philox_block8(blk++, stream_lo, stream_hi, seed, buf);
      pos = 0;
    }
    __m256i w = buf[pos++];
    const __m256d scale = _mm256_set1_pd(0x1p-32);
    const __m256d off = _mm256_set1_pd(0.5 + 0x1p-33);
    u_lo = _mm256_add_pd(_mm256_mul_pd(_mm256_cvtepi32_pd(_mm256_castsi256_si128(w)), scale), off);
    u_hi = _mm256_add_pd(
        _mm256_mul_pd(_mm256_cvtepi32_pd(_mm256_extracti128_si256(w, 1)), scale), off);
  }
};

// Categorical draw for 4 lanes: count of cumulative entries <= u over the
// padded row, clamped to the admissible length (same rule as
// select_from_cum).
inline __m128i select_half(const double* cum, const int32_t* sym, const int32_t* len,
                           __m128i cur, __m256d u, int n, __m128i vn) {
  __m128i row = _mm_mullo_epi32(cur, vn);
  __m256d cnt = _mm256_setzero_pd();
  const __m256d one = _mm256_set1_pd(1.0);
  for (int t = 0; t < n; ++t) {
    __m128i idx = _mm_add_epi32(row, _mm_set1_epi32(t));
    __m256d c = _mm256_i32gather_pd(cum, idx, 8);
    __m256d m = _mm256_cmp_pd(c, u, _CMP_LE_OQ);
    cnt = _mm256_add_pd(cnt, _mm256_and_pd(m, one));
  }
  __m128i ci = _mm256_cvttpd_epi32(cnt);
  __m128i lenv = _mm_i32gather_epi32(len, cur, 4);
  ci = _mm_min_epi32(ci, _mm_sub_epi32(lenv, _mm_set1_epi32(1)));
  return _mm_i32gather_epi32(sym, _mm_add_epi32(row, ci), 4);
}

// Initial draw: one shared cumulative row of length n.
inline __m128i select_init_half(const double* cum, const int32_t* sym, int n, __m256d u) {
  __m256d cnt = _mm256_setzero_pd();
  const __m256d one = _mm256_set1_pd(1.0);
  for (int t = 0; t < n; ++t) {
    __m256d c = _mm256_set1_pd(cum[t]);
    __m256d m = _mm256_cmp_pd(c, u, _CMP_LE_OQ);
    cnt = _mm256_add_pd(cnt, _mm256_and_pd(m, one));
  }
  __m128i ci = _mm256_cvttpd_epi32(cnt);
  ci = _mm_min_epi32(ci, _mm_set1_epi32(n - 1));
  return _mm_i32gather_epi32(sym, ci, 4);
}

inline __m256d gather_pair(const double* tab, __m128i from, __m128i to, __m128i vn) {
  __m128i idx = _mm_add_epi32(_mm_mullo_epi32(from, vn), to);
  return _mm256_i32gather_pd(tab, idx, 8);
}

inline void store4i(__m128i v, int32_t* dst) {
  _mm_storeu_si128(reinterpret_cast<__m128i*>(dst), v);
}

}  // namespace

void snapshots_avx2(const ChainTables& t, const int32_t* grid, int g_count,
                    int64_t s_begin, int64_t s_end, int64_t stride, uint64_t seed,
                    SnapshotBuffers out) {
  const int n = t.n;
  const int32_t n_max = grid[g_count - 1];
  const __m128i vn = _mm_set1_epi32(n);

  int64_t s = s_begin;
  for (; s + 8 <= s_end; s += 8) {
    VecStream fwd, bwd;
    fwd.init(seed, s, 0);
    bwd.init(seed, s, 1);

    __m256d u_lo, u_hi;
    fwd.next(u_lo, u_hi);
    __m128i w0_lo = select_init_half(t.cum_init.data(), t.sym_init.data(), n, u_lo);
    __m128i w0_hi = select_init_half(t.cum_init.data(), t.sym_init.data(), n, u_hi);

    __m128i cur_lo = w0_lo, cur_hi = w0_hi;
    __m128i w1_lo = w0_lo, w1_hi = w0_hi;
    __m256d cg_lo = _mm256_setzero_pd(), cg_hi = _mm256_setzero_pd();
    __m256d cf_lo = _mm256_setzero_pd(), cf_hi = _mm256_setzero_pd();
    int gi = 0;
    for (int32_t i = 0; i < n_max; ++i) {
      fwd.next(u_lo, u_hi);
      __m128i nxt_lo =
          select_half(t.cum_fwd.data(), t.sym_fwd.data(), t.len_fwd.data(), cur_lo, u_lo, n, vn);
      __m128i nxt_hi =
          select_half(t.cum_fwd.data(), t.sym_fwd.data(), t.len_fwd.data(), cur_hi, u_hi, n, vn);
      if (i == 0) {
        w1_lo = nxt_lo;
        w1_hi = nxt_hi;
      }
      cg_lo = _mm256_add_pd(cg_lo, gather_pair(t.g_pair.data(), cur_lo, nxt_lo, vn));
      cg_hi = _mm256_add_pd(cg_hi, gather_pair(t.g_pair.data(), cur_hi, nxt_hi, vn));
      cf_lo = _mm256_add_pd(cf_lo, gather_pair(t.fu_pair.data(), cur_lo, nxt_lo, vn));
      cf_hi = _mm256_add_pd(cf_hi, gather_pair(t.fu_pair.data(), cur_hi, nxt_hi, vn));
      if (i + 1 == grid[gi]) {
        double* base_g = out.sg_f + static_cast<size_t>(gi) * stride + s;
        double* base_f = out.sf_f + static_cast<size_t>(gi) * stride + s;
        _mm256_storeu_pd(base_g, cg_lo);
        _mm256_storeu_pd(base_g + 4, cg_hi);
        _mm256_storeu_pd(base_f, cf_lo);
        _mm256_storeu_pd(base_f + 4, cf_hi);
        ++gi;
      }
      cur_lo = nxt_lo;
      cur_hi = nxt_hi;
    }

    cur_lo = w0_lo;
    cur_hi = w0_hi;
    __m256d cgb_lo = _mm256_setzero_pd(), cgb_hi = _mm256_setzero_pd();
    __m256d cfb_lo = gather_pair(t.fs_pair.data(), w0_lo, w1_lo, vn);
    __m256d cfb_hi = gather_pair(t.fs_pair.data(), w0_hi, w1_hi, vn);
    gi = 0;
    for (int32_t k = 1; k <= n_max; ++k) {
      bwd.next(u_lo, u_hi);
      __m128i prv_lo =
          select_half(t.cum_bwd.data(), t.sym_bwd.data(), t.len_bwd.data(), cur_lo, u_lo, n, vn);
      __m128i prv_hi =
          select_half(t.cum_bwd.data(), t.sym_bwd.data(), t.len_bwd.data(), cur_hi, u_hi, n, vn);
      cgb_lo = _mm256_add_pd(cgb_lo, gather_pair(t.g_pair.data(), prv_lo, cur_lo, vn));
      cgb_hi = _mm256_add_pd(cgb_hi, gather_pair(t.g_pair.data(), prv_hi, cur_hi, vn));
      if (k == grid[gi]) {
        double* base_g = out.sg_b + static_cast<size_t>(gi) * stride + s;
        double* base_f = out.sf_b + static_cast<size_t>(gi) * stride + s;
        _mm256_storeu_pd(base_g, cgb_lo);
        _mm256_storeu_pd(base_g + 4, cgb_hi);
        _mm256_storeu_pd(base_f, cfb_lo);
        _mm256_storeu_pd(base_f + 4, cfb_hi);
        ++gi;
      }
      cfb_lo = _mm256_add_pd(cfb_lo, gather_pair(t.fs_pair.data(), prv_lo, cur_lo, vn));
      cfb_hi = _mm256_add_pd(cfb_hi, gather_pair(t.fs_pair.data(), prv_hi, cur_hi, vn));
      cur_lo = prv_lo;
      cur_hi = prv_hi;
    }
  }
  if (s < s_end) snapshots_scalar(t, grid, g_count, s, s_end, stride, seed, out);
}

void stopping_avx2(const ChainTables& t, const double* thr, int g_count,
                   int64_t s_begin, int64_t s_end, int64_t stride, uint64_t seed,
                   int64_t step_cap, StoppingBuffers out) {
  const int n = t.n;
  const __m128i vn = _mm_set1_epi32(n);
  const double inf = std::numeric_limits<double>::infinity();

  int64_t s = s_begin;
  for (; s + 8 <= s_end; s += 8) {
    VecStream fwd, bwd;
    fwd.init(seed, s, 0);
    bwd.init(seed, s, 1);

    __m256d u_lo, u_hi;
    fwd.next(u_lo, u_hi);
    __m128i w0_lo = select_init_half(t.cum_init.data(), t.sym_init.data(), n, u_lo);
    __m128i w0_hi = select_init_half(t.cum_init.data(), t.sym_init.data(), n, u_hi);

    alignas(16) int32_t w0_arr[8];
    store4i(w0_lo, w0_arr);
    store4i(w0_hi, w0_arr + 4);

    int gf[8];
    alignas(32) double thr_arr[8];
    for (int l = 0; l < 8; ++l) {
      gf[l] = 0;
      thr_arr[l] = thr[0];
    }
    __m256d thr_lo = _mm256_load_pd(thr_arr);
    __m256d thr_hi = _mm256_load_pd(thr_arr + 4);

    __m128i cur_lo = w0_lo, cur_hi = w0_hi;
    __m128i w1_lo = w0_lo, w1_hi = w0_hi;
    __m256d cg_lo = _mm256_setzero_pd(), cg_hi = _mm256_setzero_pd();
    __m256d cf_lo = _mm256_setzero_pd(), cf_hi = _mm256_setzero_pd();

    int pending = 8;
    for (int64_t i = 0; pending > 0; ++i) {
      if (i > step_cap) throw Error(ErrorCode::Numeric, "stopping kernel exceeded step cap");
      fwd.next(u_lo, u_hi);
      __m128i nxt_lo =
          select_half(t.cum_fwd.data(), t.sym_fwd.data(), t.len_fwd.data(), cur_lo, u_lo, n, vn);
      __m128i nxt_hi =
          select_half(t.cum_fwd.data(), t.sym_fwd.data(), t.len_fwd.data(), cur_hi, u_hi, n, vn);
      if (i == 0) {
        w1_lo = nxt_lo;
        w1_hi = nxt_hi;
      }
      __m256d nf_lo = _mm256_add_pd(cf_lo, gather_pair(t.fu_pair.data(), cur_lo, nxt_lo, vn));
      __m256d nf_hi = _mm256_add_pd(cf_hi, gather_pair(t.fu_pair.data(), cur_hi, nxt_hi, vn));

      int mask = _mm256_movemask_pd(_mm256_cmp_pd(nf_lo, thr_lo, _CMP_GE_OQ)) |
                 (_mm256_movemask_pd(_mm256_cmp_pd(nf_hi, thr_hi, _CMP_GE_OQ)) << 4);
      if (mask) {
        alignas(32) double nf_arr[8], cg_arr[8];
        _mm256_store_pd(nf_arr, nf_lo);
        _mm256_store_pd(nf_arr + 4, nf_hi);
        _mm256_store_pd(cg_arr, cg_lo);
        _mm256_store_pd(cg_arr + 4, cg_hi);
        for (int l = 0; l < 8; ++l) {
          if (!(mask & (1 << l))) continue;
          while (gf[l] < g_count && nf_arr[l] >= thr[gf[l]]) {
            out.n1[static_cast<size_t>(gf[l]) * stride + (s + l)] = static_cast<int32_t>(i);
            out.ln_mu[static_cast<size_t>(gf[l]) * stride + (s + l)] = cg_arr[l];
            ++gf[l];
          }
          if (gf[l] == g_count) {
            thr_arr[l] = inf;
            --pending;
          } else {
            thr_arr[l] = thr[gf[l]];
          }
        }
        thr_lo = _mm256_load_pd(thr_arr);
        thr_hi = _mm256_load_pd(thr_arr + 4);
      }
      cg_lo = _mm256_add_pd(cg_lo, gather_pair(t.g_pair.data(), cur_lo, nxt_lo, vn));
      cg_hi = _mm256_add_pd(cg_hi, gather_pair(t.g_pair.data(), cur_hi, nxt_hi, vn));
      cf_lo = nf_lo;
      cf_hi = nf_hi;
      cur_lo = nxt_lo;
      cur_hi = nxt_hi;
    }

    // Backward: n2 = 0 first, using Fs on the (w0, w1) pair.
    int gb[8];
    __m256d cfb_lo = gather_pair(t.fs_pair.data(), w0_lo, w1_lo, vn);
    __m256d cfb_hi = gather_pair(t.fs_pair.data(), w0_hi, w1_hi, vn);
    {
      alignas(32) double cfb_arr[8];
      _mm256_store_pd(cfb_arr, cfb_lo);
      _mm256_store_pd(cfb_arr + 4, cfb_hi);
      pending = 8;
      for (int l = 0; l < 8; ++l) {
        gb[l] = 0;
        while (gb[l] < g_count && cfb_arr[l] >= thr[gb[l]]) {
          out.n2[static_cast<size_t>(gb[l]) * stride + (s + l)] = 0;
          out.ln_mu[static_cast<size_t>(gb[l]) * stride + (s + l)] +=
              t.ln_v[static_cast<size_t>(w0_arr[l])];
          ++gb[l];
        }
        if (gb[l] == g_count) {
          thr_arr[l] = inf;
          --pending;
        } else {
          thr_arr[l] = thr[gb[l]];
        }
      }
      thr_lo = _mm256_load_pd(thr_arr);
      thr_hi = _mm256_load_pd(thr_arr + 4);
    }

    cur_lo = w0_lo;
    cur_hi = w0_hi;
    __m256d cgb_lo = _mm256_setzero_pd(), cgb_hi = _mm256_setzero_pd();
    for (int64_t k = 1; pending > 0; ++k) {
      if (k > step_cap) throw Error(ErrorCode::Numeric, "stopping kernel exceeded step cap");
      bwd.next(u_lo, u_hi);
      __m128i prv_lo =
          select_half(t.cum_bwd.data(), t.sym_bwd.data(), t.len_bwd.data(), cur_lo, u_lo, n, vn);
      __m128i prv_hi =
          select_half(t.cum_bwd.data(), t.sym_bwd.data(), t.len_bwd.data(), cur_hi, u_hi, n, vn);
      cgb_lo = _mm256_add_pd(cgb_lo, gather_pair(t.g_pair.data(), prv_lo, cur_lo, vn));
      cgb_hi = _mm256_add_pd(cgb_hi, gather_pair(t.g_pair.data(), prv_hi, cur_hi, vn));
      cfb_lo = _mm256_add_pd(cfb_lo, gather_pair(t.fs_pair.data(), prv_lo, cur_lo, vn));
      cfb_hi = _mm256_add_pd(cfb_hi, gather_pair(t.fs_pair.data(), prv_hi, cur_hi, vn));

      int mask = _mm256_movemask_pd(_mm256_cmp_pd(cfb_lo, thr_lo, _CMP_GE_OQ)) |
                 (_mm256_movemask_pd(_mm256_cmp_pd(cfb_hi, thr_hi, _CMP_GE_OQ)) << 4);
      if (mask) {
        alignas(32) double cfb_arr[8], cgb_arr[8];
        alignas(16) int32_t prv_arr[8];
        _mm256_store_pd(cfb_arr, cfb_lo);
        _mm256_store_pd(cfb_arr + 4, cfb_hi);
        _mm256_store_pd(cgb_arr, cgb_lo);
        _mm256_store_pd(cgb_arr + 4, cgb_hi);
        store4i(prv_lo, prv_arr);
        store4i(prv_hi, prv_arr + 4);
        for (int l = 0; l < 8; ++l) {
          if (!(mask & (1 << l))) continue;
          while (gb[l] < g_count && cfb_arr[l] >= thr[gb[l]]) {
            out.n2[static_cast<size_t>(gb[l]) * stride + (s + l)] = static_cast<int32_t>(k);
            out.ln_mu[static_cast<size_t>(gb[l]) * stride + (s + l)] +=
                cgb_arr[l] + t.ln_v[static_cast<size_t>(prv_arr[l])];
            ++gb[l];
          }
          if (gb[l] == g_count) {
            thr_arr[l] = inf;
            --pending;
          } else {
            thr_arr[l] = thr[gb[l]];
          }
        }
        thr_lo = _mm256_load_pd(thr_arr);
        thr_hi = _mm256_load_pd(thr_arr + 4);
      }
      cur_lo = prv_lo;
      cur_hi = prv_hi;
    }
  }
  if (s < s_end) stopping_scalar(t, thr, g_count, s, s_end, stride, seed, step_cap, out);
}

}  // namespace sftdim

#endif  // __AVX2__
