#pragma once

#include <vector>

#include "sftdim/ballmass.hpp"
#include "sftdim/config.hpp"
#include "sftdim/fluctuation.hpp"
#include "sftdim/solver.hpp"

namespace testutil {

inline sftdim::Sft full2() { return sftdim::validate_sft({{1, 1}, {1, 1}}, 0.5); }
inline sftdim::Sft golden() { return sftdim::validate_sft({{1, 1}, {1, 0}}, 0.5); }

inline sftdim::MarkovMeasure uniform_bernoulli() {
  return sftdim::validate_markov(full2(), {{0.5, 0.5}, {0.5, 0.5}});
}

inline sftdim::MarkovMeasure golden_half() {
  return sftdim::validate_markov(golden(), {{0.5, 0.5}, {1.0, 0.0}});
}

// Depth-1 function on a 2-symbol shift.
inline sftdim::LocallyConstantFn fn1(const sftdim::Sft& sft, double f1, double f2) {
  return sftdim::LocallyConstantFn::from_lex_values(sft, 1, {f1, f2});
}

inline const double kLn2 = std::log(2.0);
inline const double kLn4 = std::log(4.0);
inline const double kLn6 = std::log(6.0);

}  // namespace testutil
