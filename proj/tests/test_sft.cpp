#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <set>

#include "helpers.hpp"

using namespace sftdim;
using namespace testutil;

TEST_CASE("validate_sft accepts and rejects") {
  Sft f = full2();
  CHECK(f.n == 2);
  CHECK(f.edge(0, 1));
  CHECK(f.name(1) == "2");

  CHECK_THROWS_WITH_AS(validate_sft({{1, 1}, {0, 0}}, 0.5), doctest::Contains("symbol 2"),
                       Error);
  try {
    validate_sft({{1, 1}, {0, 0}}, 0.5);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::StrandedSymbol);
    CHECK(e.index_i() == 2);
  }
  CHECK_THROWS_AS(validate_sft({{1, 1}, {1, 1}}, 1.5), Error);
  CHECK_THROWS_AS(validate_sft({{1, 1}, {1, 1}}, 0.0), Error);
  CHECK_NOTHROW(golden());
  // Column of zeros is also stranded.
  CHECK_THROWS_AS(validate_sft({{1, 0}, {1, 0}}, 0.5), Error);
}

namespace {

bool power_positive(const Sft& sft, int p) {
  const int n = sft.n;
  std::vector<uint8_t> b = sft.adj;
  for (int step = 1; step < p; ++step) {
    std::vector<uint8_t> next(static_cast<size_t>(n) * n, 0);
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < n; ++k)
        if (b[static_cast<size_t>(i) * n + k])
          for (int j = 0; j < n; ++j)
            next[static_cast<size_t>(i) * n + j] |= sft.adj[static_cast<size_t>(k) * n + j];
    b = std::move(next);
  }
  for (uint8_t x : b)
    if (!x) return false;
  return true;
}

}  // namespace

TEST_CASE("mixing_index") {
  CHECK(mixing_index(full2()) == 1);
  CHECK(mixing_index(golden()) == 2);
  Sft perm = validate_sft({{0, 1}, {1, 0}}, 0.5);
  CHECK(!mixing_index(perm, 64).has_value());

  // Monotone consistency: once positive, every further power is positive.
  Sft three = validate_sft({{1, 1, 0}, {0, 1, 1}, {1, 0, 1}}, 0.3);
  for (const Sft& sft : {full2(), golden(), three}) {
    auto p = mixing_index(sft);
    REQUIRE(p.has_value());
    CHECK(power_positive(sft, *p));
    CHECK(power_positive(sft, *p + 1));
    if (*p > 1) CHECK(!power_positive(sft, *p - 1));
  }
}

TEST_CASE("enumerate_words and counts") {
  auto w3 = enumerate_words(full2(), 3);
  CHECK(w3.size() == 8);
  CHECK(std::is_sorted(w3.begin(), w3.end()));

  auto g3 = enumerate_words(golden(), 3);
  std::vector<std::vector<int>> expect = {{0, 0, 0}, {0, 0, 1}, {0, 1, 0}, {1, 0, 0}, {1, 0, 1}};
  CHECK(g3 == expect);

  auto g1 = enumerate_words(golden(), 1);
  CHECK(g1 == std::vector<std::vector<int>>{{0}, {1}});

  Sft three = validate_sft({{1, 1, 0}, {0, 1, 1}, {1, 0, 1}}, 0.3);
  for (const Sft& sft : {full2(), golden(), three})
    for (int k = 1; k <= 8; ++k)
      CHECK(enumerate_words(sft, k).size() == count_words(sft, k));
}

namespace {

// Independent brute force: all strings, cyclic filter, minimal rotation,
// primitive filter.
std::set<std::vector<int>> brute_cycles(const Sft& sft, int l_max) {
  std::set<std::vector<int>> out;
  for (int L = 1; L <= l_max; ++L) {
    std::vector<int> w(L, 0);
    while (true) {
      bool ok = true;
      for (int i = 0; i < L && ok; ++i) ok = sft.edge(w[i], w[(i + 1) % L]);
      if (ok) {
        std::vector<int> best = w;
        for (int r = 1; r < L; ++r) {
          std::vector<int> rot(L);
          for (int i = 0; i < L; ++i) rot[i] = w[(i + r) % L];
          best = std::min(best, rot);
        }
        bool primitive = true;
        for (int d = 1; d < L; ++d) {
          if (L % d) continue;
          bool per = true;
          for (int i = 0; i < L && per; ++i) per = best[i] == best[i % d];
          if (per) primitive = false;
        }
        if (primitive) out.insert(best);
      }
      int pos = L - 1;
      while (pos >= 0 && w[pos] == sft.n - 1) w[pos--] = 0;
      if (pos < 0) break;
      ++w[pos];
    }
  }
  return out;
}

}  // namespace

TEST_CASE("enumerate_cycles") {
  auto c2 = enumerate_cycles(full2(), 2);
  REQUIRE(c2.size() == 3);
  CHECK(c2[0].syms == std::vector<int>{0});
  CHECK(c2[1].syms == std::vector<int>{1});
  CHECK(c2[2].syms == std::vector<int>{0, 1});

  auto g2 = enumerate_cycles(golden(), 2);
  REQUIRE(g2.size() == 2);
  CHECK(g2[0].syms == std::vector<int>{0});
  CHECK(g2[1].syms == std::vector<int>{0, 1});

  auto g3 = enumerate_cycles(golden(), 3);
  REQUIRE(g3.size() == 3);
  CHECK(g3[2].syms == std::vector<int>{0, 0, 1});

  Sft three = validate_sft({{1, 1, 0}, {0, 1, 1}, {1, 0, 1}}, 0.3);
  for (const Sft& sft : {full2(), golden(), three}) {
    auto got = enumerate_cycles(sft, 6);
    std::set<std::vector<int>> got_set;
    for (const auto& c : got) {
      CHECK(sft.edge(c.syms.back(), c.syms.front()));
      got_set.insert(c.syms);
    }
    CHECK(got_set.size() == got.size());
    CHECK(got_set == brute_cycles(sft, 6));
  }
}

TEST_CASE("make_word admissibility") {
  CHECK_NOTHROW(make_word(golden(), {0, 1, 0, 0}, -2));
  CHECK_THROWS_AS(make_word(golden(), {1, 1}, 0), Error);
  Word w = make_word(golden(), {0, 1, 0}, -1);
  CHECK(w.end_index() == 1);
  CHECK(w.at_index(0) == 1);
}

TEST_CASE("birkhoff_sum") {
  Sft f = full2();
  auto c = LocallyConstantFn::constant(f, 1, 1.75);
  Word w = make_word(f, {0, 1, 1, 0, 1}, 0);
  CHECK(birkhoff_sum(c, w) == doctest::Approx(5 * 1.75).epsilon(1e-15));

  // Depth-2 function on golden-mean word "121": f(12) + f(21).
  Sft g = golden();
  auto pairs = enumerate_words(g, 2);  // 11, 12, 21
  LocallyConstantFn f2 = LocallyConstantFn::from_lex_values(g, 2, {3.0, 5.0, 7.0});
  Word w121 = make_word(g, {0, 1, 0}, 0);
  CHECK(birkhoff_sum(f2, w121) == doctest::Approx(12.0).epsilon(1e-15));

  CHECK_THROWS_AS(birkhoff_sum(f2, make_word(g, {0}, 0)), Error);

  // Random function/word against a freshly written window scan.
  Sft three = validate_sft({{1, 1, 0}, {0, 1, 1}, {1, 0, 1}}, 0.3);
  auto words3 = enumerate_words(three, 2);
  std::vector<double> vals;
  for (size_t i = 0; i < words3.size(); ++i) vals.push_back(0.37 * static_cast<double>(i + 1));
  LocallyConstantFn fr = LocallyConstantFn::from_lex_values(three, 2, vals);
  Word rw = make_word(three, {0, 1, 2, 0, 0, 1, 1, 2, 2}, -4);
  double naive = 0.0;
  for (size_t i = 0; i + 1 < rw.syms.size(); ++i) {
    int win[2] = {rw.syms[i], rw.syms[i + 1]};
    naive += fr.at(std::span<const int>(win, 2));
  }
  CHECK(birkhoff_sum(fr, rw) == doctest::Approx(naive).epsilon(1e-15));
}

TEST_CASE("cyclic_birkhoff_sum wraps") {
  Sft f = full2();
  LocallyConstantFn f2 = LocallyConstantFn::from_lex_values(f, 2, {1.0, 2.0, 4.0, 8.0});
  Cycle c{{0, 1}};
  CHECK(cyclic_birkhoff_sum(f2, c) == doctest::Approx(2.0 + 4.0).epsilon(1e-15));
  Cycle fixed{{1}};
  CHECK(cyclic_birkhoff_sum(f2, fixed) == doctest::Approx(8.0).epsilon(1e-15));
}

TEST_CASE("block_recode golden at ell=2") {
  Sft g = golden();
  LocallyConstantFn f2 = LocallyConstantFn::from_lex_values(g, 2, {3.0, 5.0, 7.0});
  LocallyConstantFn fns_in[1] = {f2};
  Recoded rec = block_recode(g, std::span<const LocallyConstantFn>(fns_in, 1), 2);

  REQUIRE(rec.sft.n == 3);
  CHECK(rec.sft.names == std::vector<std::string>{"1.1", "1.2", "2.1"});
  // 11 -> {11,12}, 12 -> {21}, 21 -> {11,12}
  CHECK(rec.sft.edge(0, 0));
  CHECK(rec.sft.edge(0, 1));
  CHECK(!rec.sft.edge(0, 2));
  CHECK(!rec.sft.edge(1, 0));
  CHECK(!rec.sft.edge(1, 1));
  CHECK(rec.sft.edge(1, 2));
  CHECK(rec.sft.edge(2, 0));
  CHECK(rec.sft.edge(2, 1));
  CHECK(!rec.sft.edge(2, 2));

  // Depth 2 became depth 1, values read off the letter.
  REQUIRE(rec.fns[0].depth() == 1);
  int w0[1] = {0};
  int w1[1] = {1};
  int w2[1] = {2};
  CHECK(rec.fns[0].at(std::span<const int>(w0, 1)) == 3.0);
  CHECK(rec.fns[0].at(std::span<const int>(w1, 1)) == 5.0);
  CHECK(rec.fns[0].at(std::span<const int>(w2, 1)) == 7.0);

  // Word-count bijection via the sliding window.
  for (int m = 1; m <= 6; ++m) CHECK(count_words(rec.sft, m) == count_words(g, m + 1));

  // Birkhoff sums are preserved along corresponding orbits.
  Word orig = make_word(g, {0, 0, 1, 0, 1, 0, 0}, 0);
  std::vector<int> letters;
  for (size_t i = 0; i + 1 < orig.syms.size(); ++i) {
    std::vector<int> pair = {orig.syms[i], orig.syms[i + 1]};
    for (size_t a = 0; a < rec.letters.size(); ++a)
      if (rec.letters[a] == pair) letters.push_back(static_cast<int>(a));
  }
  Word rw = make_word(rec.sft, letters, 0);
  CHECK(birkhoff_sum(rec.fns[0], rw) ==
        doctest::Approx(birkhoff_sum(f2, orig)).epsilon(1e-14));
}

TEST_CASE("block_recode deepens") {
  // Depth-3 function at ell=2 keeps depth 2; at ell=3 becomes depth 1.
  Sft f = full2();
  auto words3 = enumerate_words(f, 3);
  std::vector<double> vals;
  for (size_t i = 0; i < words3.size(); ++i) vals.push_back(static_cast<double>(i) + 0.5);
  LocallyConstantFn f3 = LocallyConstantFn::from_lex_values(f, 3, vals);
  LocallyConstantFn fns_in[1] = {f3};

  Recoded r2 = block_recode(f, std::span<const LocallyConstantFn>(fns_in, 1), 2);
  CHECK(r2.fns[0].depth() == 2);
  Recoded r3 = block_recode(f, std::span<const LocallyConstantFn>(fns_in, 1), 3);
  CHECK(r3.fns[0].depth() == 1);

  Word orig = make_word(f, {0, 1, 1, 0, 1, 0}, 0);
  auto lift = [&](const Recoded& rec, int ell) {
    std::vector<int> letters;
    for (size_t i = 0; i + ell <= orig.syms.size(); ++i) {
      std::vector<int> block(orig.syms.begin() + i, orig.syms.begin() + i + ell);
      for (size_t a = 0; a < rec.letters.size(); ++a)
        if (rec.letters[a] == block) letters.push_back(static_cast<int>(a));
    }
    return make_word(rec.sft, letters, 0);
  };
  CHECK(birkhoff_sum(r2.fns[0], lift(r2, 2)) ==
        doctest::Approx(birkhoff_sum(f3, orig)).epsilon(1e-14));
  CHECK(birkhoff_sum(r3.fns[0], lift(r3, 3)) ==
        doctest::Approx(birkhoff_sum(f3, orig)).epsilon(1e-14));
}
