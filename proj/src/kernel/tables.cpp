#include <cmath>
#include <cstddef>

#include "sftdim/kernel.hpp"

namespace sftdim {

namespace {

// Compressed cumulative rows padded to width n. Padding entries carry
// cum = 2.0 (never at or below a uniform draw) and repeat the last
// admissible symbol.
void build_cum_rows(int n, const std::vector<double>& P, std::vector<double>& cum,
                    std::vector<int32_t>& sym, std::vector<int32_t>& len) {
  cum.assign(static_cast<size_t>(n) * n, 2.0);
  sym.assign(static_cast<size_t>(n) * n, 0);
  len.assign(static_cast<size_t>(n), 0);
  for (int i = 0; i < n; ++i) {
    double acc = 0.0;
    int m = 0;
    for (int j = 0; j < n; ++j) {
      double p = P[static_cast<size_t>(i) * n + j];
      if (p <= 0.0) continue;
      acc += p;
      cum[static_cast<size_t>(i) * n + m] = acc;
      sym[static_cast<size_t>(i) * n + m] = j;
      ++m;
    }
    len[static_cast<size_t>(i)] = m;
    for (int k = m; k < n; ++k) sym[static_cast<size_t>(i) * n + k] = sym[static_cast<size_t>(i) * n + (m - 1)];
  }
}

// Depth <= 2 functions expanded onto dense (from, to) pair tables.
std::vector<double> expand_pairs(const MarkovMeasure& m, const LocallyConstantFn* fn,
                                 double* min_out) {
  const int n = m.sft.n;
  std::vector<double> t(static_cast<size_t>(n) * n, 0.0);
  double mn = 0.0;
  bool first = true;
  if (fn) {
    if (fn->depth() > 2)
      throw Error(ErrorCode::Schema, "sampling kernels need depth <= 2; block-recode first");
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        if (!m.sft.edge(i, j)) continue;
        double v = fn->pair(i, j);
        t[static_cast<size_t>(i) * n + j] = v;
        mn = first ? v : std::fmin(mn, v);
        first = false;
      }
  }
  if (min_out) *min_out = first ? 0.0 : mn;
  return t;
}

}  // namespace

ChainTables ChainTables::build(const MarkovMeasure& m, const LocallyConstantFn* fu,
                               const LocallyConstantFn* fs) {
  const int n = m.sft.n;
  ChainTables t;
  t.n = n;

  t.cum_init.assign(static_cast<size_t>(n), 0.0);
  t.sym_init.assign(static_cast<size_t>(n), 0);
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    acc += m.v[static_cast<size_t>(i)];
    t.cum_init[static_cast<size_t>(i)] = acc;
    t.sym_init[static_cast<size_t>(i)] = i;
  }
  t.len_init = n;

  build_cum_rows(n, m.P, t.cum_fwd, t.sym_fwd, t.len_fwd);
  build_cum_rows(n, reversed_chain(m), t.cum_bwd, t.sym_bwd, t.len_bwd);

  t.g_pair.assign(static_cast<size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (m.sft.edge(i, j)) t.g_pair[static_cast<size_t>(i) * n + j] = std::log(m.p(i, j));

  t.fu_pair = expand_pairs(m, fu, &t.min_fu);
  t.fs_pair = expand_pairs(m, fs, &t.min_fs);

  t.ln_v.assign(static_cast<size_t>(n), 0.0);
  for (int i = 0; i < n; ++i) t.ln_v[static_cast<size_t>(i)] = std::log(m.v[static_cast<size_t>(i)]);
  return t;
}

}  // namespace sftdim
