#include "sftdim/solver.hpp"

#include <cmath>
#include <cstddef>

#include "sftdim/linalg.hpp"
#include "sftdim/rng.hpp"

namespace sftdim {

namespace {

SquareMat weight_matrix(const Sft& sft, const LocallyConstantFn& fu, double s) {
  SquareMat m(sft.n);
  for (int i = 0; i < sft.n; ++i)
    for (int j = 0; j < sft.n; ++j)
      if (sft.edge(i, j)) m.at(i, j) = std::exp(-s * fu.pair(i, j));
  return m;
}

double log_rho(const Sft& sft, const LocallyConstantFn& fu, double s) {
  return std::log(perron_data(weight_matrix(sft, fu, s)).rho);
}

// Deterministic endpoint of the search segment: a long simple cycle as a
// 0/1 successor map, smoothed into the interior by delta. States off the
// cycle follow their first admissible successor. A cycle touching several
// states keeps the segment away from the equal-rows family, whose members
// carry rank-one orbit vectors.
//
// The cycle comes from a greedy walk (always the smallest unvisited
// successor, then the longest closable suffix), which is O(n^2) and gives
// the full alternating cycle on the small models of interest.
std::vector<double> low_entropy_endpoint(const Sft& sft, double delta) {
  const int n = sft.n;
  std::vector<int> path = {0};
  std::vector<uint8_t> visited(static_cast<size_t>(n), 0);
  visited[0] = 1;
  for (;;) {
    int cur = path.back();
    int next = -1;
    for (int j = 0; j < n; ++j)
      if (sft.edge(cur, j) && !visited[static_cast<size_t>(j)]) {
        next = j;
        break;
      }
    if (next < 0) break;
    visited[static_cast<size_t>(next)] = 1;
    path.push_back(next);
  }
  // Close the longest suffix that the last state can reach back into; one
  // exists because every state has an admissible successor on the path.
  size_t close = path.size() - 1;
  for (size_t j = 0; j < path.size(); ++j)
    if (sft.edge(path.back(), path[j])) {
      close = j;
      break;
    }

  std::vector<int> succ(static_cast<size_t>(n), -1);
  for (size_t i = close; i < path.size(); ++i) {
    size_t k = (i + 1 <= path.size() - 1) ? i + 1 : close;
    succ[static_cast<size_t>(path[i])] = path[k];
  }
  for (int i = 0; i < n; ++i) {
    if (succ[static_cast<size_t>(i)] >= 0) continue;
    for (int j = 0; j < n; ++j)
      if (sft.edge(i, j)) {
        succ[static_cast<size_t>(i)] = j;
        break;
      }
  }

  std::vector<double> P(static_cast<size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i) {
    int deg = sft.out_degree(i);
    for (int j = 0; j < n; ++j) {
      if (!sft.edge(i, j)) continue;
      double det = (j == succ[static_cast<size_t>(i)]) ? 1.0 : 0.0;
      P[static_cast<size_t>(i) * n + j] = (1.0 - delta) * det + delta / deg;
    }
  }
  return P;
}

std::vector<double> blend(const std::vector<double>& lo, const std::vector<double>& hi, double t) {
  std::vector<double> out(lo.size());
  for (size_t i = 0; i < lo.size(); ++i) out[i] = (1.0 - t) * lo[i] + t * hi[i];
  return out;
}

int free_parameters(const Sft& sft) {
  int f = 0;
  for (int i = 0; i < sft.n; ++i) f += sft.out_degree(i) - 1;
  return f;
}

struct LevelPoint {
  MarkovMeasure measure;
  int ell_used = 1;
  double a1 = 0.0;
  Sft sft;
  std::vector<LocallyConstantFn> fns;  // recoded along the way
};

// Bisects ratio(P(t)) = 1/2 on the segment between two support-compatible
// matrices whose ratios straddle 1/2.
MarkovMeasure bisect_segment(const Sft& sft, const LocallyConstantFn& fu,
                             const std::vector<double>& p_low, double r_low,
                             const std::vector<double>& p_high, double r_high,
                             const SolveOptions& opts) {
  if (!((r_low - 0.5) * (r_high - 0.5) < 0.0))
    throw Error(ErrorCode::Numeric, "level-set bracket does not straddle 1/2");
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < opts.max_bisect; ++it) {
    double t = 0.5 * (lo + hi);
    MarkovMeasure mid = validate_markov(sft, blend(p_low, p_high, t));
    double r = entropy_ratio(mid, fu);
    if (std::fabs(r - 0.5) <= opts.tol) return mid;
    bool mid_high = (r > 0.5);
    bool low_high = (r_low > 0.5);
    if (mid_high == low_high)
      lo = t;
    else
      hi = t;
  }
  throw Error(ErrorCode::Numeric, "level-set bisection did not converge");
}

void check_options(const SolveOptions& opts) {
  if (!(opts.tol > 0.0) || opts.ell_max < 1 ||
      !(opts.delta_interior > 0.0 && opts.delta_interior < 1.0) || opts.max_bisect < 1)
    throw Error(ErrorCode::Schema, "invalid solve options");
}

LevelPoint find_level_point(Sft sft, LocallyConstantFn roof, LocallyConstantFn fu,
                            LocallyConstantFn fs, const SolveOptions& opts) {
  check_options(opts);
  LevelPoint out;
  int ell = 1;

  // Reduce to a depth <= 2 potential before touching the transfer matrix.
  if (fu.depth() > 2) {
    int jump = fu.depth() - 1;
    LocallyConstantFn fns_in[3] = {roof, fu, fs};
    Recoded rec = block_recode(sft, std::span<const LocallyConstantFn>(fns_in, 3), jump);
    sft = rec.sft;
    roof = rec.fns[0];
    fu = rec.fns[1];
    fs = rec.fns[2];
    ell = jump;
  }

  while (true) {
    double s_star = bowen_root(sft, fu);
    double a1;
    MarkovMeasure maxm = max_markov_measure(sft, fu).measure;
    a1 = entropy_ratio(maxm, fu);

    if (std::fabs(a1 - 0.5) <= opts.tol) {
      out.measure = std::move(maxm);
    } else if (a1 > 0.5 + opts.tol) {
      std::vector<double> p_low = low_entropy_endpoint(sft, opts.delta_interior);
      MarkovMeasure low = validate_markov(sft, p_low);
      double r_low = entropy_ratio(low, fu);
      out.measure = bisect_segment(sft, fu, low.P, r_low, maxm.P, a1, opts);
    } else {
      // a1 tracks the Bowen root for depth <= 2 potentials, and recoding
      // cannot push past it.
      if (s_star <= 0.5 + opts.tol)
        throw Error(ErrorCode::Infeasible,
                    "max entropy ratio s* = " + std::to_string(s_star) +
                        " is not above 1/2; no dimension-2 measure exists in this family",
                    0, 0, s_star);
      if (ell + 1 > opts.ell_max)
        throw Error(ErrorCode::Infeasible,
                    "ratio 1/2 not reached within ell_max recodings", 0, 0, s_star);
      LocallyConstantFn fns_in[3] = {roof, fu, fs};
      Recoded rec = block_recode(sft, std::span<const LocallyConstantFn>(fns_in, 3), 2);
      sft = rec.sft;
      roof = rec.fns[0];
      fu = rec.fns[1];
      fs = rec.fns[2];
      ell += 1;
      continue;
    }
    out.ell_used = ell;
    out.a1 = a1;
    out.sft = sft;
    out.fns = {roof, fu, fs};
    return out;
  }
}

}  // namespace

double entropy_ratio(const MarkovMeasure& m, const LocallyConstantFn& fu) {
  return shift_entropy(m) / integrate(m, fu);
}

double bowen_root(const Sft& sft, const LocallyConstantFn& fu) {
  if (fu.depth() > 2)
    throw Error(ErrorCode::Schema, "bowen_root needs depth <= 2; block-recode first");
  if (!fu.strictly_positive())
    throw Error(ErrorCode::NonPositiveFunction, "F^u must be strictly positive");
  if (!mixing_index(sft))
    throw Error(ErrorCode::NotMixing, "Bowen root requires a mixing shift");

  double lo = 0.0;
  double g_lo = log_rho(sft, fu, lo);
  if (g_lo <= 0.0) return 0.0;  // cannot happen for a mixing shift on >= 2 symbols
  double hi = 1.0;
  while (log_rho(sft, fu, hi) > 0.0) {
    hi *= 2.0;
    if (hi > 1e9) throw Error(ErrorCode::Numeric, "Bowen root bracket expansion failed");
  }
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    if (log_rho(sft, fu, mid) > 0.0)
      lo = mid;
    else
      hi = mid;
    if (hi - lo <= 1e-15 * std::fmax(1.0, hi)) break;
  }
  return 0.5 * (lo + hi);
}

MaxMarkov max_markov_measure(const Sft& sft, const LocallyConstantFn& fu) {
  double s_star = bowen_root(sft, fu);
  SquareMat m = weight_matrix(sft, fu, s_star);
  PerronData pd = perron_data(m);
  const int n = sft.n;
  std::vector<double> P(static_cast<size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i) {
    double row = 0.0;
    for (int j = 0; j < n; ++j) {
      if (!sft.edge(i, j)) continue;
      double p = m.at(i, j) * pd.right[static_cast<size_t>(j)] / pd.right[static_cast<size_t>(i)];
      P[static_cast<size_t>(i) * n + j] = p;
      row += p;
    }
    // rho(M(s*)) = 1 only up to the bisection tolerance; pin the rows.
    for (int j = 0; j < n; ++j) P[static_cast<size_t>(i) * n + j] /= row;
  }
  MaxMarkov out{0.0, validate_markov(sft, std::move(P))};
  out.a1 = entropy_ratio(out.measure, fu);
  return out;
}

SolveResult solve_dimension_two(const Sft& sft, const LocallyConstantFn& roof,
                                const LocallyConstantFn& fu, const LocallyConstantFn& fs,
                                const SolveOptions& opts) {
  LevelPoint lp = find_level_point(sft, roof, fu, fs, opts);
  SolveResult res;
  res.measure = std::move(lp.measure);
  res.ell_used = lp.ell_used;
  res.a_ell = lp.a1;
  res.sft = std::move(lp.sft);
  res.roof = lp.fns[0];
  res.fu = lp.fns[1];
  res.fs = lp.fns[2];
  res.stats = flow_stats(res.measure, res.roof, res.fu, &res.fs);
  return res;
}

std::vector<MarkovMeasure> level_set_sample(const Sft& sft, const LocallyConstantFn& fu,
                                            int count, const SolveOptions& opts) {
  if (count < 1) throw Error(ErrorCode::Schema, "count must be >= 1");
  LocallyConstantFn unit_roof = LocallyConstantFn::constant(sft, 1, 1.0);
  LevelPoint base = find_level_point(sft, unit_roof, fu, fu, opts);
  if (count == 1) return {base.measure};

  const Sft& s = base.sft;
  const LocallyConstantFn& f = base.fns[1];
  if (free_parameters(s) < 2)
    throw Error(ErrorCode::DegenerateLevelSet,
                "the Markov simplex has fewer than two free parameters");

  MaxMarkov maxm = max_markov_measure(s, f);
  std::vector<double> p_low = low_entropy_endpoint(s, opts.delta_interior);
  double r_low = entropy_ratio(validate_markov(s, p_low), f);
  const int n = s.n;

  std::vector<MarkovMeasure> out = {base.measure};
  auto distinct = [&](const MarkovMeasure& cand) {
    for (const auto& have : out) {
      double diff = 0.0;
      for (size_t i = 0; i < cand.P.size(); ++i)
        diff = std::fmax(diff, std::fabs(cand.P[i] - have.P[i]));
      if (diff < 1e-6) return false;
    }
    return true;
  };

  UniformStream dirs(opts.seed, 0x6c65766cULL);  // level-set direction stream
  const int max_attempts = 64 * count;
  for (int attempt = 0; attempt < max_attempts && static_cast<int>(out.size()) < count;
       ++attempt) {
    // Random direction in the tangent space of the row-sum constraints,
    // supported on admissible entries.
    std::vector<double> dir(static_cast<size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i) {
      int deg = s.out_degree(i);
      if (deg < 2) continue;
      double mean = 0.0;
      for (int j = 0; j < n; ++j)
        if (s.edge(i, j)) {
          double g = dirs.next() - 0.5;
          dir[static_cast<size_t>(i) * n + j] = g;
          mean += g;
        }
      mean /= deg;
      for (int j = 0; j < n; ++j)
        if (s.edge(i, j)) dir[static_cast<size_t>(i) * n + j] -= mean;
    }

    // Largest step keeping every admissible entry above the interior floor.
    const std::vector<double>& p0 = base.measure.P;
    double t_max = 1e300;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        if (!s.edge(i, j)) continue;
        double d = dir[static_cast<size_t>(i) * n + j];
        if (d >= 0.0) continue;
        double floor_ij = opts.delta_interior / s.out_degree(i);
        double room = p0[static_cast<size_t>(i) * n + j] - floor_ij;
        if (room <= 0.0) {
          t_max = 0.0;
        } else {
          t_max = std::fmin(t_max, room / (-d));
        }
      }
    if (!(t_max > 0.0) || t_max > 1e200) continue;

    std::vector<double> probe(p0.size());
    for (size_t i = 0; i < p0.size(); ++i) probe[i] = p0[i] + 0.8 * t_max * dir[i];
    MarkovMeasure probe_m = validate_markov(s, probe);
    double r = entropy_ratio(probe_m, f);

    MarkovMeasure cand = probe_m;
    if (std::fabs(r - 0.5) > opts.tol) {
      // Bracket back across the level set: toward the maximizer from below,
      // toward the low-entropy endpoint from above. Both segments stay in
      // the support-compatible simplex by convexity.
      if (r > 0.5) {
        cand = bisect_segment(s, f, p_low, r_low, probe_m.P, r, opts);
      } else {
        if (!(maxm.a1 > 0.5 + opts.tol)) continue;
        cand = bisect_segment(s, f, probe_m.P, r, maxm.measure.P, maxm.a1, opts);
      }
    }
    if (distinct(cand)) out.push_back(std::move(cand));
  }
  if (static_cast<int>(out.size()) < count)
    throw Error(ErrorCode::DegenerateLevelSet,
                "could not find " + std::to_string(count) + " distinct level-set points");
  return out;
}

}  // namespace sftdim
