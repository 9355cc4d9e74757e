#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "sftdim/linalg.hpp"

using namespace sftdim;
using namespace testutil;

TEST_CASE("flow_stats closed form: roof 2, Fu = ln4 on the full 2-shift") {
  MarkovMeasure u = uniform_bernoulli();
  auto roof = LocallyConstantFn::constant(u.sft, 1, 2.0);
  auto fu = LocallyConstantFn::constant(u.sft, 1, kLn4);
  FlowStats s = flow_stats(u, roof, fu);
  CHECK(std::fabs(s.h_flow - kLn2 / 2.0) <= 1e-14);
  CHECK(std::fabs(s.lambda - kLn4 / 2.0) <= 1e-14);
  CHECK(std::fabs(s.dim - 2.0) <= 1e-12);
  CHECK(std::fabs(s.a - kLn2) <= 1e-14);
  CHECK(std::fabs(s.b - kLn4) <= 1e-13);
  CHECK(!s.entropy_exceeds_exponent);
}

TEST_CASE("dim is invariant under roof rescaling") {
  MarkovMeasure g = golden_half();
  auto fu = fn1(g.sft, kLn2, kLn6);
  auto roof = fn1(g.sft, 1.0, 1.25);
  auto roof_scaled = fn1(g.sft, 17.0, 17.0 * 1.25);
  FlowStats s1 = flow_stats(g, roof, fu);
  FlowStats s2 = flow_stats(g, roof_scaled, fu);
  CHECK(std::fabs(s1.dim - s2.dim) <= 1e-13);
}

TEST_CASE("Fu = roof forces lambda = 1") {
  // Constant-curvature preset: the expansion along the flow equals the roof.
  for (const MarkovMeasure& m : {uniform_bernoulli(), golden_half(),
                                 validate_markov(full2(), {{0.3, 0.7}, {0.8, 0.2}})}) {
    auto r = fn1(m.sft, kLn2, kLn6);
    FlowStats s = flow_stats(m, r, r);
    CHECK(s.lambda == 1.0);
  }
}

TEST_CASE("check_dim_two residuals") {
  MarkovMeasure u = uniform_bernoulli();
  FlowStats dim2 = flow_stats(u, LocallyConstantFn::constant(u.sft, 1, 2.0),
                              LocallyConstantFn::constant(u.sft, 1, kLn4));
  DimTwoReport r2 = check_dim_two(dim2, 1e-10);
  CHECK(r2.is_dim_two);
  CHECK(std::fabs(r2.residual_ratio) <= 1e-12);
  CHECK(std::fabs(r2.residual_b2a) <= 1e-12);

  FlowStats dim3 = flow_stats(u, LocallyConstantFn::constant(u.sft, 1, 1.0),
                              LocallyConstantFn::constant(u.sft, 1, kLn2));
  DimTwoReport r3 = check_dim_two(dim3, 1e-10);
  CHECK(!r3.is_dim_two);
  CHECK(std::fabs(r3.residual_ratio - 0.5) <= 1e-14);
  CHECK(std::fabs(dim3.dim - 3.0) <= 1e-12);
}

TEST_CASE("non-positive functions are rejected") {
  MarkovMeasure u = uniform_bernoulli();
  auto bad = fn1(u.sft, 1.0, 0.0);
  auto good = LocallyConstantFn::constant(u.sft, 1, 1.0);
  CHECK_THROWS_AS(flow_stats(u, bad, good), Error);
  CHECK_THROWS_AS(flow_stats(u, good, bad), Error);
}

TEST_CASE("entropy above exponent is flagged, not rejected") {
  MarkovMeasure u = uniform_bernoulli();
  FlowStats s = flow_stats(u, LocallyConstantFn::constant(u.sft, 1, 1.0),
                           LocallyConstantFn::constant(u.sft, 1, std::log(1.1)));
  CHECK(s.entropy_exceeds_exponent);
  CHECK(s.dim > 3.0);
}

TEST_CASE("fs mean mismatch warning") {
  MarkovMeasure u = uniform_bernoulli();
  auto roof = LocallyConstantFn::constant(u.sft, 1, 1.0);
  auto fu = LocallyConstantFn::constant(u.sft, 1, kLn2);
  auto fs_off = fn1(u.sft, kLn2, kLn2 + 0.1);
  FlowStats s = flow_stats(u, roof, fu, &fs_off);
  CHECK(s.fs_mean_mismatch);
  FlowStats ok = flow_stats(u, roof, fu, &fu);
  CHECK(!ok.fs_mean_mismatch);
}

TEST_CASE("block recoding preserves flow statistics") {
  MarkovMeasure g = golden_half();
  auto roof = fn1(g.sft, 1.0, 1.25);
  auto fu = fn1(g.sft, kLn2, kLn6);
  FlowStats base = flow_stats(g, roof, fu);

  for (int ell = 2; ell <= 3; ++ell) {
    LocallyConstantFn fns_in[2] = {roof, fu};
    Recoded rec = block_recode(g.sft, std::span<const LocallyConstantFn>(fns_in, 2), ell);
    MarkovMeasure ind = induced_block_measure(g, rec);
    FlowStats up = flow_stats(ind, rec.fns[0], rec.fns[1]);
    CHECK(std::fabs(up.a - base.a) <= 1e-10);
    CHECK(std::fabs(up.b - base.b) <= 1e-10);
    CHECK(std::fabs(up.roof_mean - base.roof_mean) <= 1e-10);
    CHECK(std::fabs(up.dim - base.dim) <= 1e-10);
  }
}

TEST_CASE("dim bounds by topological entropy") {
  for (const MarkovMeasure& m : {golden_half(), uniform_bernoulli(),
                                 validate_markov(full2(), {{0.2, 0.8}, {0.6, 0.4}})}) {
    SquareMat a(m.sft.n);
    for (int i = 0; i < m.sft.n; ++i)
      for (int j = 0; j < m.sft.n; ++j) a.at(i, j) = m.sft.edge(i, j) ? 1.0 : 0.0;
    double h_top = std::log(perron_data(a).rho);
    auto fu = fn1(m.sft, 0.9, 1.7);
    FlowStats s = flow_stats(m, LocallyConstantFn::constant(m.sft, 1, 1.0), fu);
    CHECK(s.dim >= 1.0);
    CHECK(s.dim <= 1.0 + 2.0 * h_top / fu.min_value() + 1e-9);
  }
}
