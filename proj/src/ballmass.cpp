#include "sftdim/ballmass.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <ostream>
#include <sstream>

namespace sftdim {

double stopping_threshold(double epsilon, double c) {
  if (!(epsilon > 0.0 && epsilon < 1.0))
    throw Error(ErrorCode::Schema, "epsilon must lie in (0,1)");
  double t = -std::log(epsilon) + c;
  return t - 1e-12 * std::fmax(1.0, std::fabs(t));
}

namespace {

double threshold_from_log(double log_epsilon, double c) {
  double t = -log_epsilon + c;
  return t - 1e-12 * std::fmax(1.0, std::fabs(t));
}

int scan_crossing(const Word& path, const LocallyConstantFn& fn, bool backward,
                  double threshold) {
  const int k = fn.depth();
  double acc = 0.0;
  for (int m = 0;; ++m) {
    int pos = backward ? -m : m;
    if (pos < path.start_index || pos + k - 1 > path.end_index())
      throw Error(ErrorCode::WordTooShort,
                  "path cannot certify the stopping-time crossing");
    acc += fn.at(std::span<const int>(path.syms.data() + (pos - path.start_index),
                                      static_cast<size_t>(k)));
    if (acc >= threshold) return m;
  }
}

// Round to 12 significant decimal digits (via the shortest fixed/scientific
// round trip through printf), so exported statistics re-import exactly.
double round12(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return std::strtod(buf, nullptr);
}

std::string format12(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return std::string(buf);
}

}  // namespace

std::string format_exp_of(double log_value) {
  // exp(log_value) rendered as 12-digit scientific notation straight from
  // the logarithm; immune to double under/overflow of the value itself.
  static const double kLog10 = std::log(10.0);
  double y = log_value / kLog10;
  double e10 = std::floor(y);
  double mant = std::pow(10.0, y - e10);
  // Rounding the mantissa may carry it to 10.0.
  char mbuf[32];
  std::snprintf(mbuf, sizeof mbuf, "%.11f", mant);
  if (std::strncmp(mbuf, "10.", 3) == 0) {
    mant /= 10.0;
    e10 += 1.0;
    std::snprintf(mbuf, sizeof mbuf, "%.11f", mant);
  }
  char buf[48];
  std::snprintf(buf, sizeof buf, "%se%+04d", mbuf, static_cast<int>(e10));
  return std::string(buf);
}

StoppingTimes stopping_times(const Word& path, const LocallyConstantFn& fu,
                             const LocallyConstantFn& fs, double epsilon, double c) {
  if (!fu.strictly_positive() || !fs.strictly_positive())
    throw Error(ErrorCode::NonPositiveFunction, "stopping sums require positive F^u, F^s");
  double thr = stopping_threshold(epsilon, c);
  StoppingTimes st;
  st.n1 = scan_crossing(path, fu, false, thr);
  st.n2 = scan_crossing(path, fs, true, thr);
  return st;
}

MassBound mass_lower_bound(const MarkovMeasure& m, const Word& path,
                           const LocallyConstantFn& fu, const LocallyConstantFn& fs,
                           double epsilon, double c) {
  StoppingTimes st = stopping_times(path, fu, fs, epsilon, c);
  if (path.start_index > -st.n2 || path.end_index() < st.n1)
    throw Error(ErrorCode::WordTooShort, "path does not cover the stopping cylinder");
  std::vector<int> cyl;
  cyl.reserve(static_cast<size_t>(st.n1 + st.n2 + 1));
  for (int i = -st.n2; i <= st.n1; ++i) cyl.push_back(path.at_index(i));
  Word cylinder{-st.n2, std::move(cyl)};

  MassBound out;
  out.n1 = st.n1;
  out.n2 = st.n2;
  double log_mu = log_cylinder_mass(m, cylinder);
  out.log_bound = std::log(epsilon / 2.0) + log_mu;
  out.log_ratio = out.log_bound - 2.0 * std::log(epsilon);
  out.bound = (epsilon / 2.0) * std::exp(log_mu);
  out.ratio = std::exp(out.log_ratio);
  return out;
}

DiagnosticSeries singularity_series(const MarkovMeasure& m, const LocallyConstantFn& fu,
                                    const LocallyConstantFn& fs, double d, double c,
                                    const std::vector<int>& n_grid, int64_t samples,
                                    uint64_t seed, const KernelOptions& opts) {
  if (n_grid.empty()) throw Error(ErrorCode::BadGrid, "empty n grid");
  for (size_t i = 0; i < n_grid.size(); ++i) {
    if (n_grid[i] < 1 || (i > 0 && n_grid[i] <= n_grid[i - 1]))
      throw Error(ErrorCode::BadGrid, "n grid must be strictly increasing and >= 1");
  }
  if (samples < 1) throw Error(ErrorCode::Schema, "samples must be >= 1");

  DiagnosticSeries series;
  series.a = shift_entropy(m);
  series.b = integrate(m, fu);
  series.residual_ratio = series.a / series.b - 0.5;
  series.dim_two_warning = std::fabs(series.residual_ratio) > 1e-6;
  series.params = DiagnosticParams{d, c, 5.0, samples, seed};

  const double b = series.b;
  const size_t g_count = n_grid.size();
  std::vector<double> thresholds(g_count);
  for (size_t g = 0; g < g_count; ++g)
    thresholds[g] = threshold_from_log(-n_grid[g] * b, c);  // -ln eps(n) = n b

  ChainTables tables = ChainTables::build(m, &fu, &fs);
  std::vector<int32_t> n1(g_count * static_cast<size_t>(samples));
  std::vector<int32_t> n2(g_count * static_cast<size_t>(samples));
  std::vector<double> ln_mu(g_count * static_cast<size_t>(samples));
  StoppingRequest req;
  req.tables = &tables;
  req.thresholds = thresholds;
  req.samples = samples;
  req.seed = seed;
  run_stopping(req, StoppingBuffers{n1.data(), n2.data(), ln_mu.data()}, opts);

  const double ab_ratio = series.a / series.b;
  std::vector<double> log_ratios(static_cast<size_t>(samples));
  series.rows.reserve(g_count);
  for (size_t g = 0; g < g_count; ++g) {
    const double n = static_cast<double>(n_grid[g]);
    const double log_eps = -n * b;
    // ln(bound / eps^2) = n b - ln 2 + ln mu(cylinder)
    const double* mu = ln_mu.data() + g * static_cast<size_t>(samples);
    for (int64_t s = 0; s < samples; ++s)
      log_ratios[static_cast<size_t>(s)] = n * b - std::log(2.0) + mu[s];
    std::sort(log_ratios.begin(), log_ratios.end());

    DiagnosticRow row;
    row.n = n_grid[g];
    row.log_epsilon = log_eps;
    row.epsilon_str = format_exp_of(log_eps);
    row.max_log_ratio = round12(log_ratios.back());
    // Nearest-rank 90th percentile.
    size_t rank = static_cast<size_t>(
        std::ceil(0.9 * static_cast<double>(samples)));
    row.q90_log_ratio = round12(log_ratios[rank - 1]);
    double exceed_cut = d * std::sqrt(n) - 2.0 * c * ab_ratio - std::log(2.0);
    int64_t cnt = 0;
    for (double lr : log_ratios) cnt += (lr >= exceed_cut) ? 1 : 0;
    row.frac_exceed = static_cast<double>(cnt) / static_cast<double>(samples);
    series.rows.push_back(std::move(row));
  }
  return series;
}

void export_series(const DiagnosticSeries& series, std::ostream& out) {
  out << "n,epsilon,max_log_ratio,q90_log_ratio,frac_exceed\n";
  for (const auto& row : series.rows) {
    out << row.n << ',' << row.epsilon_str << ',' << format12(row.max_log_ratio) << ','
        << format12(row.q90_log_ratio) << ',' << format12(row.frac_exceed) << '\n';
  }
}

void export_series(const DiagnosticSeries& series, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::Io, "cannot open " + path + " for writing");
  export_series(series, f);
  f.flush();
  if (!f) throw Error(ErrorCode::Io, "write to " + path + " failed");
}

DiagnosticSeries import_series(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "n,epsilon,max_log_ratio,q90_log_ratio,frac_exceed")
    throw Error(ErrorCode::Io, "bad series header");
  DiagnosticSeries series;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string field;
    DiagnosticRow row;
    if (!std::getline(ss, field, ',')) throw Error(ErrorCode::Io, "bad series row");
    row.n = std::stoi(field);
    if (!std::getline(ss, field, ',')) throw Error(ErrorCode::Io, "bad series row");
    row.epsilon_str = field;
    {
      // Recover log from the mantissa/exponent rendering.
      size_t e_pos = field.find('e');
      if (e_pos == std::string::npos) throw Error(ErrorCode::Io, "bad epsilon field");
      double mant = std::strtod(field.substr(0, e_pos).c_str(), nullptr);
      int e10 = std::stoi(field.substr(e_pos + 1));
      row.log_epsilon = std::log(mant) + e10 * std::log(10.0);
    }
    if (!std::getline(ss, field, ',')) throw Error(ErrorCode::Io, "bad series row");
    row.max_log_ratio = std::strtod(field.c_str(), nullptr);
    if (!std::getline(ss, field, ',')) throw Error(ErrorCode::Io, "bad series row");
    row.q90_log_ratio = std::strtod(field.c_str(), nullptr);
    if (!std::getline(ss, field, ',')) throw Error(ErrorCode::Io, "bad series row");
    row.frac_exceed = std::strtod(field.c_str(), nullptr);
    series.rows.push_back(std::move(row));
  }
  return series;
}

DiagnosticSeries import_series(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::Io, "cannot open " + path);
  return import_series(f);
}

}  // namespace sftdim
