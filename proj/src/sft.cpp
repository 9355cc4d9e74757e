#include "sftdim/sft.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>

namespace sftdim {

int Sft::out_degree(int i) const {
  int d = 0;
  for (int j = 0; j < n; ++j) d += edge(i, j) ? 1 : 0;
  return d;
}

Sft validate_sft(const std::vector<std::vector<int>>& adjacency, double theta,
                 std::vector<std::string> names) {
  const int n = static_cast<int>(adjacency.size());
  if (n < 2) throw Error(ErrorCode::Schema, "alphabet must have at least 2 symbols");
  for (const auto& row : adjacency)
    if (static_cast<int>(row.size()) != n)
      throw Error(ErrorCode::Schema, "adjacency matrix is not square");
  if (!(theta > 0.0 && theta < 1.0))
    throw Error(ErrorCode::BadTheta, "theta must lie strictly inside (0,1)", 0, 0, theta);

  Sft sft;
  sft.n = n;
  sft.theta = theta;
  sft.adj.assign(static_cast<size_t>(n) * n, 0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      int v = adjacency[i][j];
      if (v != 0 && v != 1) throw Error(ErrorCode::Schema, "adjacency entries must be 0 or 1", i + 1, j + 1);
      sft.adj[static_cast<size_t>(i) * n + j] = static_cast<uint8_t>(v);
    }
  for (int i = 0; i < n; ++i) {
    bool row = false, col = false;
    for (int j = 0; j < n; ++j) {
      row = row || sft.edge(i, j);
      col = col || sft.edge(j, i);
    }
    if (!row || !col)
      throw Error(ErrorCode::StrandedSymbol,
                  "symbol " + std::to_string(i + 1) + " has no " + (row ? "incoming" : "outgoing") +
                      " transition",
                  i + 1);
  }
  if (names.empty()) {
    names.reserve(n);
    for (int i = 0; i < n; ++i) names.push_back(std::to_string(i + 1));
  }
  if (static_cast<int>(names.size()) != n)
    throw Error(ErrorCode::Schema, "alphabet name count does not match adjacency size");
  sft.names = std::move(names);
  return sft;
}

std::optional<int> mixing_index(const Sft& sft, int p_max) {
  const int n = sft.n;
  std::vector<uint8_t> b = sft.adj;
  auto all_positive = [&]() {
    for (uint8_t x : b)
      if (!x) return false;
    return true;
  };
  for (int p = 1; p <= p_max; ++p) {
    if (all_positive()) return p;
    if (p == p_max) break;
    std::vector<uint8_t> next(static_cast<size_t>(n) * n, 0);
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < n; ++k) {
        if (!b[static_cast<size_t>(i) * n + k]) continue;
        for (int j = 0; j < n; ++j)
          next[static_cast<size_t>(i) * n + j] |= sft.adj[static_cast<size_t>(k) * n + j];
      }
    b = std::move(next);
  }
  return std::nullopt;
}

std::optional<int> mixing_index(const Sft& sft) {
  return mixing_index(sft, (sft.n - 1) * (sft.n - 1) + 1);
}

Word make_word(const Sft& sft, std::vector<int> syms, int start_index) {
  if (syms.empty()) throw Error(ErrorCode::Schema, "empty word");
  for (int s : syms)
    if (s < 0 || s >= sft.n) throw Error(ErrorCode::Schema, "symbol out of range");
  for (size_t i = 0; i + 1 < syms.size(); ++i)
    if (!sft.edge(syms[i], syms[i + 1]))
      throw Error(ErrorCode::Inadmissible,
                  "transition " + sft.name(syms[i]) + " -> " + sft.name(syms[i + 1]) +
                      " is not admissible",
                  syms[i] + 1, syms[i + 1] + 1);
  return Word{start_index, std::move(syms)};
}

std::vector<std::vector<int>> enumerate_words(const Sft& sft, int k) {
  if (k < 1) throw Error(ErrorCode::Schema, "word length must be >= 1");
  std::vector<std::vector<int>> out;
  std::vector<int> w;
  w.reserve(k);
  // Depth-first in symbol order yields lexicographic output.
  auto rec = [&](auto&& self, int depth) -> void {
    if (depth == k) {
      out.push_back(w);
      return;
    }
    for (int s = 0; s < sft.n; ++s) {
      if (depth > 0 && !sft.edge(w.back(), s)) continue;
      w.push_back(s);
      self(self, depth + 1);
      w.pop_back();
    }
  };
  rec(rec, 0);
  return out;
}

uint64_t count_words(const Sft& sft, int k) {
  if (k < 1) throw Error(ErrorCode::Schema, "word length must be >= 1");
  const int n = sft.n;
  std::vector<uint64_t> m(static_cast<size_t>(n) * n, 0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m[static_cast<size_t>(i) * n + j] = sft.edge(i, j) ? 1 : 0;
  // m = A^{k-1} with overflow checks; counts stay tiny for the sizes used here.
  std::vector<uint64_t> acc(static_cast<size_t>(n) * n, 0);
  for (int i = 0; i < n; ++i) acc[static_cast<size_t>(i) * n + i] = 1;
  int e = k - 1;
  while (e > 0) {
    auto mul = [n](const std::vector<uint64_t>& x, const std::vector<uint64_t>& y) {
      std::vector<uint64_t> r(static_cast<size_t>(n) * n, 0);
      for (int i = 0; i < n; ++i)
        for (int kk = 0; kk < n; ++kk) {
          uint64_t xik = x[static_cast<size_t>(i) * n + kk];
          if (!xik) continue;
          for (int j = 0; j < n; ++j) {
            uint64_t prod, sum;
            if (__builtin_mul_overflow(xik, y[static_cast<size_t>(kk) * n + j], &prod) ||
                __builtin_add_overflow(r[static_cast<size_t>(i) * n + j], prod, &sum))
              throw Error(ErrorCode::Numeric, "word count overflow");
            r[static_cast<size_t>(i) * n + j] = sum;
          }
        }
      return r;
    };
    if (e & 1) acc = mul(acc, m);
    e >>= 1;
    if (e) m = mul(m, m);
  }
  uint64_t total = 0;
  for (uint64_t x : acc) {
    if (__builtin_add_overflow(total, x, &total)) throw Error(ErrorCode::Numeric, "word count overflow");
  }
  return total;
}

namespace {

bool is_minimal_rotation(const std::vector<int>& w) {
  const int L = static_cast<int>(w.size());
  for (int r = 1; r < L; ++r) {
    for (int i = 0; i < L; ++i) {
      int a = w[(i + r) % L];
      if (a != w[i]) {
        if (a < w[i]) return false;
        break;
      }
    }
  }
  return true;
}

bool is_primitive(const std::vector<int>& w) {
  const int L = static_cast<int>(w.size());
  for (int d = 1; d < L; ++d) {
    if (L % d != 0) continue;
    bool periodic = true;
    for (int i = d; i < L && periodic; ++i) periodic = (w[i] == w[i % d]);
    if (periodic) return false;
  }
  return true;
}

}  // namespace

std::vector<Cycle> enumerate_cycles(const Sft& sft, int l_max) {
  if (l_max < 1) throw Error(ErrorCode::Schema, "cycle length bound must be >= 1");
  std::vector<Cycle> out;
  std::vector<int> w;
  for (int L = 1; L <= l_max; ++L) {
    w.assign(static_cast<size_t>(L), 0);
    auto rec = [&](auto&& self, int depth) -> void {
      if (depth == L) {
        if (!sft.edge(w[static_cast<size_t>(L - 1)], w[0])) return;
        if (!is_minimal_rotation(w) || !is_primitive(w)) return;
        out.push_back(Cycle{w});
        return;
      }
      for (int s = 0; s < sft.n; ++s) {
        if (depth > 0 && !sft.edge(w[static_cast<size_t>(depth - 1)], s)) continue;
        w[static_cast<size_t>(depth)] = s;
        self(self, depth + 1);
      }
    };
    rec(rec, 0);
  }
  return out;
}

LocallyConstantFn LocallyConstantFn::from_lex_values(const Sft& sft, int depth,
                                                     std::vector<double> values) {
  if (depth < 1) throw Error(ErrorCode::Schema, "function depth must be >= 1");
  LocallyConstantFn fn;
  fn.depth_ = depth;
  fn.n_ = sft.n;
  size_t radix_size = 1;
  for (int i = 0; i < depth; ++i) {
    radix_size *= static_cast<size_t>(sft.n);
    if (radix_size > (1u << 26)) throw Error(ErrorCode::Schema, "function depth too large for alphabet");
  }
  fn.radix_.assign(radix_size, -1);
  auto words = enumerate_words(sft, depth);
  if (values.size() != words.size())
    throw Error(ErrorCode::Schema, "table size " + std::to_string(values.size()) +
                                       " does not match the " + std::to_string(words.size()) +
                                       " admissible words of depth " + std::to_string(depth));
  for (size_t idx = 0; idx < words.size(); ++idx) {
    size_t code = 0;
    for (int s : words[idx]) code = code * static_cast<size_t>(sft.n) + static_cast<size_t>(s);
    fn.radix_[code] = static_cast<int32_t>(idx);
  }
  fn.lex_ = std::move(values);
  return fn;
}

LocallyConstantFn LocallyConstantFn::constant(const Sft& sft, int depth, double c) {
  auto words = enumerate_words(sft, depth);
  return from_lex_values(sft, depth, std::vector<double>(words.size(), c));
}

double LocallyConstantFn::at(std::span<const int> window) const {
  size_t code = 0;
  for (int s : window) code = code * static_cast<size_t>(n_) + static_cast<size_t>(s);
  int32_t idx = radix_[code];
  if (idx < 0) throw Error(ErrorCode::Inadmissible, "function evaluated on inadmissible word");
  return lex_[static_cast<size_t>(idx)];
}

double LocallyConstantFn::pair(int i, int j) const {
  if (depth_ == 1) {
    int buf[1] = {i};
    return at(std::span<const int>(buf, 1));
  }
  if (depth_ == 2) {
    int buf[2] = {i, j};
    return at(std::span<const int>(buf, 2));
  }
  throw Error(ErrorCode::Schema, "pair evaluation requires depth <= 2");
}

bool LocallyConstantFn::strictly_positive() const {
  for (double v : lex_)
    if (!(v > 0.0)) return false;
  return true;
}

double LocallyConstantFn::min_value() const {
  double m = lex_.empty() ? 0.0 : lex_[0];
  for (double v : lex_) m = std::fmin(m, v);
  return m;
}

double LocallyConstantFn::max_abs() const {
  double m = 0.0;
  for (double v : lex_) m = std::fmax(m, std::fabs(v));
  return m;
}

double birkhoff_sum(const LocallyConstantFn& fn, const Word& word) {
  const int m = word.size();
  const int k = fn.depth();
  if (m < k)
    throw Error(ErrorCode::WordTooShort,
                "word of length " + std::to_string(m) + " cannot host depth " + std::to_string(k));
  double s = 0.0;
  for (int i = 0; i + k <= m; ++i)
    s += fn.at(std::span<const int>(word.syms.data() + i, static_cast<size_t>(k)));
  return s;
}

double cyclic_birkhoff_sum(const LocallyConstantFn& fn, const Cycle& cycle) {
  const int L = cycle.size();
  const int k = fn.depth();
  std::vector<int> window(static_cast<size_t>(k));
  double s = 0.0;
  for (int i = 0; i < L; ++i) {
    for (int t = 0; t < k; ++t) window[static_cast<size_t>(t)] = cycle.syms[static_cast<size_t>((i + t) % L)];
    s += fn.at(window);
  }
  return s;
}

Recoded block_recode(const Sft& sft, std::span<const LocallyConstantFn> fns, int ell) {
  if (ell < 2) throw Error(ErrorCode::Schema, "block recoding needs ell >= 2");
  Recoded out;
  out.ell = ell;
  out.letters = enumerate_words(sft, ell);
  const int m = static_cast<int>(out.letters.size());
  if (m < 2) throw Error(ErrorCode::Schema, "recoded alphabet would be trivial");

  std::vector<std::vector<int>> adj(static_cast<size_t>(m), std::vector<int>(static_cast<size_t>(m), 0));
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) {
      bool overlap = true;
      for (int t = 0; t + 1 < ell && overlap; ++t)
        overlap = (out.letters[a][static_cast<size_t>(t + 1)] == out.letters[b][static_cast<size_t>(t)]);
      adj[static_cast<size_t>(a)][static_cast<size_t>(b)] = overlap ? 1 : 0;
    }

  std::vector<std::string> names;
  names.reserve(static_cast<size_t>(m));
  for (const auto& letter : out.letters) {
    std::string name;
    for (size_t t = 0; t < letter.size(); ++t) {
      if (t) name += '.';
      name += sft.name(letter[t]);
    }
    names.push_back(std::move(name));
  }
  out.sft = validate_sft(adj, sft.theta, std::move(names));

  for (const auto& fn : fns) {
    const int k = fn.depth();
    const int k_new = std::max(1, k - ell + 1);
    auto new_words = enumerate_words(out.sft, k_new);
    std::vector<double> values;
    values.reserve(new_words.size());
    std::vector<int> old_window;
    for (const auto& nw : new_words) {
      // Expand the sliding-window concatenation, then read the first k symbols.
      old_window = out.letters[static_cast<size_t>(nw[0])];
      for (size_t t = 1; t < nw.size(); ++t)
        old_window.push_back(out.letters[static_cast<size_t>(nw[t])].back());
      values.push_back(fn.at(std::span<const int>(old_window.data(), static_cast<size_t>(k))));
    }
    out.fns.push_back(LocallyConstantFn::from_lex_values(out.sft, k_new, std::move(values)));
  }
  return out;
}

}  // namespace sftdim
