#pragma once

#include <cstdint>
#include <vector>

#include "sftdim/suspension.hpp"

namespace sftdim {

struct SolveOptions {
  double tol = 1e-10;            // |entropy/int(Fu) - 1/2| target
  int ell_max = 4;               // deepest block recoding attempted
  double delta_interior = 1e-6;  // smoothing of the deterministic endpoint
  int max_bisect = 200;
  uint64_t seed = 0;             // used by level_set_sample directions
};

// Unique s with spectral radius of M(s) = 1, where
// M_ij = A_ij exp(-s Fu(i,j)). Fu must have depth <= 2 (recode first
// otherwise) and be strictly positive; s -> ln rho(M(s)) is strictly
// decreasing, so bisection always converges.
double bowen_root(const Sft& sft, const LocallyConstantFn& fu);

// Entropy-to-integral ratio h(mu_P) / int(Fu) d mu_P.
double entropy_ratio(const MarkovMeasure& m, const LocallyConstantFn& fu);

// The ratio-maximizing Markov measure P*_ij = M_ij u_j / u_i at s = s*,
// with u the right Perron vector of M(s*). Returns a1 = ratio(P*), which
// equals the Bowen root up to roundoff.
struct MaxMarkov {
  double a1 = 0.0;
  MarkovMeasure measure;
};
MaxMarkov max_markov_measure(const Sft& sft, const LocallyConstantFn& fu);

// One measure on the dimension-2 level set, plus the (possibly recoded)
// model data it lives on.
struct SolveResult {
  MarkovMeasure measure;
  int ell_used = 1;      // 1 = original alphabet
  double a_ell = 0.0;    // max ratio found at the level used
  FlowStats stats;
  Sft sft;               // alphabet of `measure`
  LocallyConstantFn roof, fu, fs;  // recoded along with the shift
};

// Finds P with entropy ratio 1/2 by bisecting the segment between an
// interior smoothing of a deterministic cycle measure (ratio near 0) and the
// maximizing measure (ratio a1). Recodes and retries while a1 falls short of
// 1/2 at depth > 2; throws Infeasible (payload s*) when the Bowen root
// itself is at or below 1/2, since block recoding cannot raise it.
SolveResult solve_dimension_two(const Sft& sft, const LocallyConstantFn& roof,
                                const LocallyConstantFn& fu,
                                const LocallyConstantFn& fs,
                                const SolveOptions& opts = {});

// `count` pairwise-distinct measures with |ratio - 1/2| <= tol, produced by
// bisection along seeded interior directions through a solved point.
// Distinctness is max-norm separation >= 1e-6 on P. Throws
// DegenerateLevelSet when the stochastic simplex has fewer than two free
// parameters and count > 1.
std::vector<MarkovMeasure> level_set_sample(const Sft& sft, const LocallyConstantFn& fu,
                                            int count, const SolveOptions& opts = {});

}  // namespace sftdim
