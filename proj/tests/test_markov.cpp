#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "helpers.hpp"

using namespace sftdim;
using namespace testutil;

TEST_CASE("validate_markov basics") {
  MarkovMeasure u = uniform_bernoulli();
  CHECK(u.v[0] == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(u.v[1] == doctest::Approx(0.5).epsilon(1e-14));

  MarkovMeasure g = golden_half();
  CHECK(std::fabs(g.v[0] - 2.0 / 3.0) <= 1e-12);
  CHECK(std::fabs(g.v[1] - 1.0 / 3.0) <= 1e-12);

  try {
    validate_markov(golden(), {{0.5, 0.5}, {0.9, 0.1}});
    FAIL("expected SupportMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SupportMismatch);
    CHECK(e.index_i() == 2);
    CHECK(e.index_j() == 2);
  }

  try {
    validate_markov(golden(), {{0.6, 0.5}, {1.0, 0.0}});
    FAIL("expected RowSum");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::RowSum);
    CHECK(e.index_i() == 1);
  }

  // Row off by 3e-10: repaired and reported.
  MarkovMeasure r = validate_markov(golden(), {{0.5 + 3e-10, 0.5}, {1.0, 0.0}});
  CHECK(r.renormalized_rows == std::vector<int>{1});
  CHECK(std::fabs(r.p(0, 0) + r.p(0, 1) - 1.0) <= 1e-15);

  try {
    validate_markov(validate_sft({{0, 1}, {1, 0}}, 0.5), {{0.0, 1.0}, {1.0, 0.0}});
    FAIL("expected NotMixing");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotMixing);
  }
}

TEST_CASE("cylinder_mass") {
  MarkovMeasure u = uniform_bernoulli();
  CHECK(cylinder_mass(u, make_word(u.sft, {0, 1})) == doctest::Approx(0.25).epsilon(1e-15));

  MarkovMeasure g = golden_half();
  CHECK(std::fabs(cylinder_mass(g, make_word(g.sft, {0, 1})) - 1.0 / 3.0) <= 1e-14);
  CHECK(cylinder_mass(g, make_word(g.sft, {0})) == g.v[0]);
  CHECK(cylinder_mass(g, make_word(g.sft, {1})) == g.v[1]);

  // Shift invariance: mass depends only on the symbols.
  Word a = make_word(g.sft, {0, 1, 0, 0}, 0);
  Word b = make_word(g.sft, {0, 1, 0, 0}, -7);
  CHECK(cylinder_mass(g, a) == cylinder_mass(g, b));

  // Total mass one and extension consistency.
  for (const MarkovMeasure& m : {u, g}) {
    for (int len = 1; len <= 12; len += 11) {
      double total = 0.0;
      for (const auto& w : enumerate_words(m.sft, len)) total += cylinder_mass(m, Word{0, w});
      CHECK(std::fabs(total - 1.0) <= 1e-12);
    }
    for (const auto& w : enumerate_words(m.sft, 3)) {
      double ext = 0.0;
      for (int j = 0; j < m.sft.n; ++j) {
        if (!m.sft.edge(w.back(), j)) continue;
        std::vector<int> wj = w;
        wj.push_back(j);
        ext += cylinder_mass(m, Word{0, wj});
      }
      CHECK(std::fabs(ext - cylinder_mass(m, Word{0, w})) <= 1e-14);
    }
  }
}

TEST_CASE("shift_entropy closed form and cylinder oracle") {
  CHECK(shift_entropy(uniform_bernoulli()) == doctest::Approx(kLn2).epsilon(1e-15));
  CHECK(std::fabs(shift_entropy(golden_half()) - (2.0 / 3.0) * kLn2) <= 1e-14);

  // Near-deterministic rows have near-zero entropy.
  double d = 1e-8;
  MarkovMeasure det = validate_markov(full2(), {{1.0 - d, d}, {1.0 - d, d}});
  CHECK(shift_entropy(det) < 1e-5);

  // Brute-force cylinder entropy at depth m equals h + (H(v) - h)/m exactly.
  for (const MarkovMeasure& m : {golden_half(), uniform_bernoulli(),
                                 validate_markov(full2(), {{0.3, 0.7}, {0.8, 0.2}})}) {
    const int depth = 12;
    double brute = 0.0;
    for (const auto& w : enumerate_words(m.sft, depth)) {
      double mass = cylinder_mass(m, Word{0, w});
      brute -= mass * std::log(mass);
    }
    brute /= depth;
    double h = shift_entropy(m);
    double hv = 0.0;
    for (double x : m.v) hv -= x * std::log(x);
    CHECK(std::fabs(brute - (h + (hv - h) / depth)) <= 1e-10);
  }
}

TEST_CASE("integrate") {
  MarkovMeasure g = golden_half();
  LocallyConstantFn f = fn1(g.sft, 2.0, -3.0);
  CHECK(integrate(g, f) == doctest::Approx(g.v[0] * 2.0 - g.v[1] * 3.0).epsilon(1e-14));
  CHECK(std::fabs(integrate(g, LocallyConstantFn::constant(g.sft, 3, 4.25)) - 4.25) <= 1e-13);

  // Depth-3 function against a Monte Carlo average over 10^6 stationary
  // windows (one long path, batch-means standard error).
  auto words3 = enumerate_words(g.sft, 3);
  std::vector<double> vals;
  for (size_t i = 0; i < words3.size(); ++i) vals.push_back(std::cos(static_cast<double>(i)));
  LocallyConstantFn f3 = LocallyConstantFn::from_lex_values(g.sft, 3, vals);
  double exact = integrate(g, f3);

  const int64_t windows = 1000000;
  const int64_t batches = 100;
  Word path = sample_path(g, 0, static_cast<int>(windows) + 2, 99, 0);
  std::vector<double> batch_mean(static_cast<size_t>(batches), 0.0);
  const int64_t per = windows / batches;
  for (int64_t s = 0; s < windows; ++s)
    batch_mean[static_cast<size_t>(s / per)] +=
        f3.at(std::span<const int>(path.syms.data() + s, 3));
  double mean = 0.0;
  for (double& bm : batch_mean) {
    bm /= static_cast<double>(per);
    mean += bm;
  }
  mean /= static_cast<double>(batches);
  double var = 0.0;
  for (double bm : batch_mean) var += (bm - mean) * (bm - mean);
  double se = std::sqrt(var / (batches * (batches - 1.0)));
  CHECK(std::fabs(mean - exact) <= 3.0 * se);
}

TEST_CASE("potential_G") {
  MarkovMeasure u = uniform_bernoulli();
  LocallyConstantFn gu = potential_G(u);
  for (double v : gu.lex_values()) CHECK(v == doctest::Approx(-kLn2).epsilon(1e-15));

  MarkovMeasure g = golden_half();
  LocallyConstantFn gg = potential_G(g);
  int w21[2] = {1, 0};
  CHECK(gg.at(std::span<const int>(w21, 2)) == 0.0);  // ln 1

  for (const MarkovMeasure& m : {u, g, validate_markov(full2(), {{0.3, 0.7}, {0.8, 0.2}})})
    CHECK(std::fabs(-integrate(m, potential_G(m)) - shift_entropy(m)) <= 1e-12);
}

TEST_CASE("sample_path statistics") {
  MarkovMeasure g = golden_half();

  Word w1 = sample_path(g, 5, 5, 7, 3);
  Word w2 = sample_path(g, 5, 5, 7, 3);
  CHECK(w1.syms == w2.syms);
  CHECK(w1.start_index == -5);
  CHECK_NOTHROW(make_word(g.sft, w1.syms, w1.start_index));

  const int64_t n_samp = 100000;
  int64_t count0 = 0, count01 = 0, count_back01 = 0;
  for (int64_t s = 0; s < n_samp; ++s) {
    Word w = sample_path(g, 1, 1, 2024, static_cast<uint64_t>(s));
    if (s < 100) CHECK_NOTHROW(make_word(g.sft, w.syms, w.start_index));
    count0 += w.at_index(0) == 0 ? 1 : 0;
    count01 += (w.at_index(0) == 0 && w.at_index(1) == 1) ? 1 : 0;
    count_back01 += (w.at_index(-1) == 0 && w.at_index(0) == 1) ? 1 : 0;
  }
  auto within3se = [&](double freq, double p) {
    double se = std::sqrt(p * (1.0 - p) / static_cast<double>(n_samp));
    return std::fabs(freq - p) <= 3.0 * se;
  };
  CHECK(within3se(static_cast<double>(count0) / n_samp, g.v[0]));
  double mass01 = cylinder_mass(g, make_word(g.sft, {0, 1}));
  CHECK(within3se(static_cast<double>(count01) / n_samp, mass01));
  // Backward sampling keeps the same two-sided law.
  CHECK(within3se(static_cast<double>(count_back01) / n_samp, mass01));
}

TEST_CASE("induced_block_measure matches cylinder masses") {
  MarkovMeasure g = golden_half();
  LocallyConstantFn dummy[1] = {LocallyConstantFn::constant(g.sft, 1, 1.0)};
  Recoded rec = block_recode(g.sft, std::span<const LocallyConstantFn>(dummy, 1), 2);
  MarkovMeasure ind = induced_block_measure(g, rec);
  for (int a = 0; a < rec.sft.n; ++a) {
    double mass = cylinder_mass(g, Word{0, rec.letters[static_cast<size_t>(a)]});
    CHECK(std::fabs(ind.v[static_cast<size_t>(a)] - mass) <= 1e-12);
  }
}
