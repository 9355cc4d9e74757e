#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sftdim/errors.hpp"

namespace sftdim {

// Subshift of finite type: alphabet {0,..,n-1}, 0/1 adjacency matrix, and a
// metric base theta in (0,1). theta never enters any computed quantity; it is
// carried for reference and round-tripped through configs.
struct Sft {
  int n = 0;
  std::vector<uint8_t> adj;          // n*n row-major
  double theta = 0.5;
  std::vector<std::string> names;    // symbol names, size n

  bool edge(int i, int j) const { return adj[static_cast<size_t>(i) * n + j] != 0; }
  int out_degree(int i) const;
  const std::string& name(int i) const { return names[static_cast<size_t>(i)]; }
};

// Validates a candidate adjacency matrix. Rows/columns must each contain a 1
// (no stranded symbol) and theta must lie strictly inside (0,1).
// Symbol names default to "1".."n".
Sft validate_sft(const std::vector<std::vector<int>>& adjacency, double theta,
                 std::vector<std::string> names = {});

// Smallest p <= p_max with (A^p) entrywise positive, if any.
std::optional<int> mixing_index(const Sft& sft, int p_max);

// Convenience: mixing index bounded by Wielandt's (n-1)^2 + 1.
std::optional<int> mixing_index(const Sft& sft);

// A finite admissible word. start_index may be negative, so a two-sided
// cylinder [w]_{n2}^{n1} is just a Word with start_index n2.
struct Word {
  int start_index = 0;
  std::vector<int> syms;

  int size() const { return static_cast<int>(syms.size()); }
  int end_index() const { return start_index + size() - 1; }
  // Symbol at absolute position i (start_index <= i <= end_index).
  int at_index(int i) const { return syms[static_cast<size_t>(i - start_index)]; }
};

// Checks adjacency-admissibility of consecutive symbols.
Word make_word(const Sft& sft, std::vector<int> syms, int start_index = 0);

// All admissible k-words in lexicographic order.
std::vector<std::vector<int>> enumerate_words(const Sft& sft, int k);

// Word count via powers of A: sum of entries of A^{k-1}.
uint64_t count_words(const Sft& sft, int k);

// A periodic orbit: cyclically admissible, primitive (not a power of a
// shorter word), stored as its lexicographically minimal rotation.
struct Cycle {
  std::vector<int> syms;
  int size() const { return static_cast<int>(syms.size()); }
};

// All periodic orbits of length <= l_max, ordered by length then
// lexicographically.
std::vector<Cycle> enumerate_cycles(const Sft& sft, int l_max);

// Depth-k locally constant function: a value for every admissible k-word.
// Values are stored in the lexicographic order of enumerate_words(sft, k).
class LocallyConstantFn {
 public:
  LocallyConstantFn() = default;

  static LocallyConstantFn from_lex_values(const Sft& sft, int depth,
                                           std::vector<double> values);
  static LocallyConstantFn constant(const Sft& sft, int depth, double c);

  int depth() const { return depth_; }
  int alphabet_size() const { return n_; }
  const std::vector<double>& lex_values() const { return lex_; }

  // Value on an admissible window of exactly `depth` symbols.
  double at(std::span<const int> window) const;
  // Depth <= 2 evaluation on the admissible pair (i,j); depth-1 functions
  // read the first symbol.
  double pair(int i, int j) const;

  bool strictly_positive() const;
  double min_value() const;
  double max_abs() const;

 private:
  int depth_ = 0;
  int n_ = 0;
  std::vector<double> lex_;
  std::vector<int32_t> radix_;  // n^depth -> lex index, -1 when inadmissible
};

// Birkhoff sum over all depth-length windows of the word
// (m - depth + 1 terms). Throws WordTooShort when m < depth.
double birkhoff_sum(const LocallyConstantFn& fn, const Word& word);

// Birkhoff sum over one period of the periodic orbit, windows read
// cyclically.
double cyclic_birkhoff_sum(const LocallyConstantFn& fn, const Cycle& cycle);

// Result of an l-block recoding: the new shift uses admissible l-words of
// the old shift as its alphabet, with edges given by (l-1)-symbol overlap.
// A depth-k function becomes depth max(1, k-l+1) with values read off the
// overlapping old word; Birkhoff sums over corresponding orbits agree.
struct Recoded {
  Sft sft;
  int ell = 1;
  std::vector<std::vector<int>> letters;  // new symbol -> old l-word
  std::vector<LocallyConstantFn> fns;
};

Recoded block_recode(const Sft& sft, std::span<const LocallyConstantFn> fns, int ell);

}  // namespace sftdim
