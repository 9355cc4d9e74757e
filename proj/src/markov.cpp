#include "sftdim/markov.hpp"

#include <cmath>
#include <cstddef>

#include "sftdim/kernel.hpp"
#include "sftdim/linalg.hpp"
#include "sftdim/rng.hpp"

namespace sftdim {

namespace {

constexpr double kRowSumExact = 1e-12;
constexpr double kRowSumRepairable = 1e-9;

std::vector<double> stationary_vector(const Sft& sft, const std::vector<double>& P) {
  const int n = sft.n;
  // (P^T - I) v = 0 with the last equation replaced by sum(v) = 1.
  SquareMat m(n);
  std::vector<double> rhs(static_cast<size_t>(n), 0.0);
  for (int i = 0; i < n - 1; ++i)
    for (int j = 0; j < n; ++j)
      m.at(i, j) = P[static_cast<size_t>(j) * n + i] - (i == j ? 1.0 : 0.0);
  for (int j = 0; j < n; ++j) m.at(n - 1, j) = 1.0;
  rhs[static_cast<size_t>(n - 1)] = 1.0;
  std::vector<double> v = solve_linear(m, rhs);

  double sum = 0.0;
  for (double x : v) sum += x;
  for (double& x : v) x /= sum;
  for (double x : v)
    if (!(x > 0.0))
      throw Error(ErrorCode::NotMixing, "stationary vector is not strictly positive");
  // vP = v residual guard.
  for (int j = 0; j < n; ++j) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += v[static_cast<size_t>(i)] * P[static_cast<size_t>(i) * n + j];
    if (std::fabs(s - v[static_cast<size_t>(j)]) > 1e-11)
      throw Error(ErrorCode::Numeric, "stationary vector residual too large");
  }
  return v;
}

}  // namespace

MarkovMeasure validate_markov(const Sft& sft, std::vector<double> P_flat) {
  const int n = sft.n;
  if (static_cast<int>(P_flat.size()) != n * n)
    throw Error(ErrorCode::Schema, "Markov matrix does not match alphabet size");

  MarkovMeasure m;
  m.sft = sft;

  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double p = P_flat[static_cast<size_t>(i) * n + j];
      if (!(p >= 0.0) || !std::isfinite(p))
        throw Error(ErrorCode::Schema, "Markov entries must be finite and nonnegative", i + 1, j + 1);
      bool pos = p > 0.0;
      if (pos != sft.edge(i, j))
        throw Error(ErrorCode::SupportMismatch,
                    "P sign pattern disagrees with adjacency at (" + std::to_string(i + 1) + "," +
                        std::to_string(j + 1) + ")",
                    i + 1, j + 1, p);
    }

  for (int i = 0; i < n; ++i) {
    double s = 0.0;
    for (int j = 0; j < n; ++j) s += P_flat[static_cast<size_t>(i) * n + j];
    double dev = std::fabs(s - 1.0);
    if (dev > kRowSumRepairable)
      throw Error(ErrorCode::RowSum,
                  "row " + std::to_string(i + 1) + " sums to " + std::to_string(s), i + 1, 0, s);
    if (dev > kRowSumExact) {
      for (int j = 0; j < n; ++j) P_flat[static_cast<size_t>(i) * n + j] /= s;
      m.renormalized_rows.push_back(i + 1);
    }
  }

  if (!mixing_index(sft))
    throw Error(ErrorCode::NotMixing, "no power of the adjacency matrix is entrywise positive");

  m.P = std::move(P_flat);
  m.v = stationary_vector(sft, m.P);
  return m;
}

MarkovMeasure validate_markov(const Sft& sft, const std::vector<std::vector<double>>& P) {
  const int n = sft.n;
  if (static_cast<int>(P.size()) != n)
    throw Error(ErrorCode::Schema, "Markov matrix does not match alphabet size");
  std::vector<double> flat;
  flat.reserve(static_cast<size_t>(n) * n);
  for (const auto& row : P) {
    if (static_cast<int>(row.size()) != n)
      throw Error(ErrorCode::Schema, "Markov matrix is not square");
    flat.insert(flat.end(), row.begin(), row.end());
  }
  return validate_markov(sft, std::move(flat));
}

double log_cylinder_mass(const MarkovMeasure& m, const Word& word) {
  double s = std::log(m.v[static_cast<size_t>(word.syms.front())]);
  for (size_t i = 0; i + 1 < word.syms.size(); ++i)
    s += std::log(m.p(word.syms[i], word.syms[i + 1]));
  return s;
}

double cylinder_mass(const MarkovMeasure& m, const Word& word) {
  double mass = m.v[static_cast<size_t>(word.syms.front())];
  for (size_t i = 0; i + 1 < word.syms.size(); ++i) mass *= m.p(word.syms[i], word.syms[i + 1]);
  return mass;
}

double shift_entropy(const MarkovMeasure& m) {
  const int n = m.sft.n;
  double h = 0.0;
  for (int i = 0; i < n; ++i) {
    double row = 0.0;
    for (int j = 0; j < n; ++j) {
      if (!m.sft.edge(i, j)) continue;
      double p = m.p(i, j);
      row += p * std::log(p);
    }
    h -= m.v[static_cast<size_t>(i)] * row;
  }
  return h;
}

double integrate(const MarkovMeasure& m, const LocallyConstantFn& fn) {
  const int k = fn.depth();
  auto words = enumerate_words(m.sft, k);
  double acc = 0.0;
  size_t idx = 0;
  for (const auto& w : words) {
    double mass = m.v[static_cast<size_t>(w[0])];
    for (size_t i = 0; i + 1 < w.size(); ++i) mass *= m.p(w[i], w[i + 1]);
    acc += mass * fn.lex_values()[idx];
    ++idx;
  }
  return acc;
}

LocallyConstantFn potential_G(const MarkovMeasure& m) {
  auto pairs = enumerate_words(m.sft, 2);
  std::vector<double> values;
  values.reserve(pairs.size());
  for (const auto& w : pairs) values.push_back(std::log(m.p(w[0], w[1])));
  return LocallyConstantFn::from_lex_values(m.sft, 2, std::move(values));
}

std::vector<double> reversed_chain(const MarkovMeasure& m) {
  const int n = m.sft.n;
  std::vector<double> rev(static_cast<size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i) {
    double sum = 0.0;
    for (int j = 0; j < n; ++j) {
      double p = m.sft.edge(j, i) ? m.v[static_cast<size_t>(j)] * m.p(j, i) / m.v[static_cast<size_t>(i)] : 0.0;
      rev[static_cast<size_t>(i) * n + j] = p;
      sum += p;
    }
    // Row sums are 1 up to roundoff by stationarity; pin them exactly so the
    // sampling tables terminate at 1.
    for (int j = 0; j < n; ++j) rev[static_cast<size_t>(i) * n + j] /= sum;
  }
  return rev;
}

Word sample_path(const MarkovMeasure& m, int n_back, int n_fwd, uint64_t seed,
                 uint64_t sequence) {
  if (n_back < 0 || n_fwd < 0) throw Error(ErrorCode::Schema, "path lengths must be >= 0");
  ChainTables t = ChainTables::build(m, nullptr, nullptr);
  const int n = m.sft.n;

  UniformStream fwd(seed, 2 * sequence);
  UniformStream bwd(seed, 2 * sequence + 1);

  std::vector<int> syms(static_cast<size_t>(n_back + n_fwd + 1), 0);
  int w0 = select_from_cum(t.cum_init.data(), t.sym_init.data(), t.len_init, fwd.next());
  syms[static_cast<size_t>(n_back)] = w0;

  int cur = w0;
  for (int i = 1; i <= n_fwd; ++i) {
    double u = fwd.next();
    cur = select_from_cum(t.cum_fwd.data() + static_cast<size_t>(cur) * n,
                          t.sym_fwd.data() + static_cast<size_t>(cur) * n,
                          t.len_fwd[static_cast<size_t>(cur)], u);
    syms[static_cast<size_t>(n_back + i)] = cur;
  }
  cur = w0;
  for (int k = 1; k <= n_back; ++k) {
    double u = bwd.next();
    cur = select_from_cum(t.cum_bwd.data() + static_cast<size_t>(cur) * n,
                          t.sym_bwd.data() + static_cast<size_t>(cur) * n,
                          t.len_bwd[static_cast<size_t>(cur)], u);
    syms[static_cast<size_t>(n_back - k)] = cur;
  }
  return Word{-n_back, std::move(syms)};
}

MarkovMeasure induced_block_measure(const MarkovMeasure& m, const Recoded& recoded) {
  const int nn = recoded.sft.n;
  std::vector<double> P(static_cast<size_t>(nn) * nn, 0.0);
  for (int a = 0; a < nn; ++a) {
    int from = recoded.letters[static_cast<size_t>(a)].back();
    for (int b = 0; b < nn; ++b) {
      if (!recoded.sft.edge(a, b)) continue;
      int to = recoded.letters[static_cast<size_t>(b)].back();
      P[static_cast<size_t>(a) * nn + b] = m.p(from, to);
    }
  }
  return validate_markov(recoded.sft, std::move(P));
}

}  // namespace sftdim
