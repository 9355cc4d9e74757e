#pragma once

#include <cstdint>
#include <vector>

#include "sftdim/sft.hpp"

namespace sftdim {

// Markov measure: stochastic matrix P compatible with the adjacency matrix
// (P_ij > 0 exactly where A_ij = 1) together with its stationary vector v.
// Immutable after validation; values may be shared freely across threads.
struct MarkovMeasure {
  Sft sft;
  std::vector<double> P;   // n*n row-major
  std::vector<double> v;   // stationary, strictly positive, sums to 1
  std::vector<int> renormalized_rows;  // rows rescaled on input (1-based)

  int n() const { return sft.n; }
  double p(int i, int j) const { return P[static_cast<size_t>(i) * sft.n + j]; }
};

// Validation: support compatibility, row sums within 1e-12 (rows deviating by
// at most 1e-9 are renormalized and reported, anything worse is rejected),
// primitivity of A, and a fresh stationary vector from a direct linear solve.
MarkovMeasure validate_markov(const Sft& sft, const std::vector<std::vector<double>>& P);
MarkovMeasure validate_markov(const Sft& sft, std::vector<double> P_flat);

// mu_P of the cylinder determined by `word`: v_{w_first} * prod P over the
// word's transitions. Independent of start_index.
double cylinder_mass(const MarkovMeasure& m, const Word& word);
double log_cylinder_mass(const MarkovMeasure& m, const Word& word);

// Shift entropy in closed form: -sum_i v_i sum_j P_ij ln P_ij.
double shift_entropy(const MarkovMeasure& m);

// Integral of a locally constant function: sum over admissible depth-words of
// cylinder mass times value.
double integrate(const MarkovMeasure& m, const LocallyConstantFn& fn);

// The depth-2 potential G(i,j) = ln P_ij. Satisfies -integrate(G) ==
// shift_entropy up to roundoff.
LocallyConstantFn potential_G(const MarkovMeasure& m);

// Time-reversed transition matrix Phat_ij = v_j P_ji / v_i (rows
// renormalized); used for stationary backward extension.
std::vector<double> reversed_chain(const MarkovMeasure& m);

// Stationary two-sided sample: symbol at index 0 drawn from v, forward
// symbols via P, backward symbols via the reversed chain. Deterministic in
// (seed, sequence); sequence selects an independent stream, so batches of
// paths can be drawn concurrently.
Word sample_path(const MarkovMeasure& m, int n_back, int n_fwd, uint64_t seed,
                 uint64_t sequence = 0);

// The l-block image of mu_P on a recoded shift: P'_{W,W'} = P over the last
// overlap step, stationary vector = cylinder masses of the letters.
MarkovMeasure induced_block_measure(const MarkovMeasure& m, const Recoded& recoded);

}  // namespace sftdim
