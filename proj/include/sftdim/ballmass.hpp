#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "sftdim/fluctuation.hpp"
#include "sftdim/markov.hpp"

namespace sftdim {

// Crossing threshold for the stopping sums: T = -ln(eps) + C, with a
// relative slack of 1e-12 so that sums landing exactly on the threshold in
// exact arithmetic (constant functions, dyadic eps) resolve to the
// mathematical side.
double stopping_threshold(double epsilon, double c);

struct StoppingTimes {
  int n1 = 0;  // minimal m with sum_{k=0}^{m} Fu(shift^k w)  >= T
  int n2 = 0;  // minimal m with sum_{k=0}^{m} Fs(shift^-k w) >= T
};

// Throws WordTooShort when the path cannot certify a crossing.
StoppingTimes stopping_times(const Word& path, const LocallyConstantFn& fu,
                             const LocallyConstantFn& fs, double epsilon, double c);

// Ball-mass lower bound proxy: bound = (eps/2) mu([w]_{-n2}^{n1}) and
// ratio = bound / eps^2. log_ratio = n b - ln 2 + ln mu with eps = e^{-nb}
// style bookkeeping is exposed for the diagnostic series.
struct MassBound {
  int n1 = 0, n2 = 0;
  double bound = 0.0;
  double ratio = 0.0;
  double log_bound = 0.0;
  double log_ratio = 0.0;
};

MassBound mass_lower_bound(const MarkovMeasure& m, const Word& path,
                           const LocallyConstantFn& fu, const LocallyConstantFn& fs,
                           double epsilon, double c);

// One row per grid n, with eps(n) = e^{-n b}. eps underflows double well
// inside the useful range of n, so rows carry log_epsilon exactly and a
// 12-significant-digit scientific rendering for the CSV. max/q90 statistics
// are rounded to 12 significant digits at construction so an exported file
// re-imports to exactly the same series.
struct DiagnosticRow {
  int n = 0;
  double log_epsilon = 0.0;      // -n b
  std::string epsilon_str;       // mantissa/exponent rendering of e^{-n b}
  double max_log_ratio = 0.0;
  double q90_log_ratio = 0.0;    // nearest-rank 90th percentile
  double frac_exceed = 0.0;      // fraction with log_ratio >= D sqrt(n) - 2C(a/b) - ln 2
};

struct DiagnosticParams {
  double d = 1.5;
  double c = 0.0;        // additive offset in the stopping threshold
  double c_tilde = 5.0;  // recorded for cross-reference with the tail events
  int64_t samples = 0;
  uint64_t seed = 0;
};

struct DiagnosticSeries {
  std::vector<DiagnosticRow> rows;
  DiagnosticParams params;
  double a = 0.0;  // entropy of the measure the series was run on
  double b = 0.0;  // int Fu; fixes the eps(n) grid
  double residual_ratio = 0.0;  // a/b - 1/2 of the input measure
  bool dim_two_warning = false; // |residual_ratio| > 1e-6
};

// Samples two-sided paths, evaluates the mass lower bound at eps(n) for each
// n in the grid, and records max, 90th percentile, and the exceedance
// fraction of log_ratio. Deterministic in (seed, params).
DiagnosticSeries singularity_series(const MarkovMeasure& m, const LocallyConstantFn& fu,
                                    const LocallyConstantFn& fs, double d, double c,
                                    const std::vector<int>& n_grid, int64_t samples,
                                    uint64_t seed, const KernelOptions& opts = {});

// CSV with header n,epsilon,max_log_ratio,q90_log_ratio,frac_exceed,
// 12 significant digits, LF line endings.
void export_series(const DiagnosticSeries& series, std::ostream& out);
void export_series(const DiagnosticSeries& series, const std::string& path);
DiagnosticSeries import_series(std::istream& in);
DiagnosticSeries import_series(const std::string& path);

// Scientific rendering used for the epsilon column: exp(log_value) as
// "m.mmmmmmmmmmme±ddd" without intermediate underflow.
std::string format_exp_of(double log_value);

}  // namespace sftdim
