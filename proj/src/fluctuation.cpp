#include "sftdim/fluctuation.hpp"

#include <cmath>
#include <cstddef>

#include "sftdim/linalg.hpp"

namespace sftdim {

namespace {

// Centered pair tables phi1 = -G - a, phi2 = F - b on admissible pairs.
// A table whose every entry is at roundoff scale is snapped to exact zero:
// the centered version of a constant observable vanishes identically, and
// the snap keeps that fact exact in the degenerate fixtures.
struct PairObs {
  int n = 0;
  std::vector<double> phi1, phi2;
};

void snap_tiny(std::vector<double>& tab, double scale) {
  double mx = 0.0;
  for (double v : tab) mx = std::fmax(mx, std::fabs(v));
  if (mx <= 1e-14 * std::fmax(1.0, scale)) {
    for (double& v : tab) v = 0.0;
  }
}

PairObs build_pair_obs(const Sft& sft, const std::vector<double>& P,
                       const LocallyConstantFn& f, double a, double b, bool reverse_window) {
  const int n = sft.n;
  PairObs obs;
  obs.n = n;
  obs.phi1.assign(static_cast<size_t>(n) * n, 0.0);
  obs.phi2.assign(static_cast<size_t>(n) * n, 0.0);
  double f_scale = f.max_abs();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (P[static_cast<size_t>(i) * n + j] <= 0.0) continue;
      obs.phi1[static_cast<size_t>(i) * n + j] = -std::log(P[static_cast<size_t>(i) * n + j]) - a;
      double fv = reverse_window ? f.pair(j, i) : f.pair(i, j);
      obs.phi2[static_cast<size_t>(i) * n + j] = fv - b;
    }
  snap_tiny(obs.phi1, 1.0 + std::fabs(a));
  snap_tiny(obs.phi2, 1.0 + f_scale);
  return obs;
}

}  // namespace

CenteredObs centered_sums(const MarkovMeasure& m, const LocallyConstantFn& fu,
                          const LocallyConstantFn& fs, const Word& path, int n_max) {
  if (n_max < 0) throw Error(ErrorCode::Schema, "n_max must be >= 0");
  const int ku = fu.depth();
  const int ks = fs.depth();
  const int need_end = std::max({n_max, n_max - 1 + ku - 1, ks - 1});
  const int need_start = -std::max(n_max, 1);
  if (n_max > 0 && (path.start_index > need_start || path.end_index() < need_end))
    throw Error(ErrorCode::WordTooShort, "path does not cover the requested horizon");

  const double a = shift_entropy(m);
  const double b = integrate(m, fu);

  CenteredObs obs;
  obs.xu.assign(static_cast<size_t>(n_max) + 1, 0.0);
  obs.yu.assign(static_cast<size_t>(n_max) + 1, 0.0);
  obs.xs.assign(static_cast<size_t>(n_max) + 1, 0.0);
  obs.ys.assign(static_cast<size_t>(n_max) + 1, 0.0);

  auto window = [&](int pos, int k) {
    return std::span<const int>(path.syms.data() + (pos - path.start_index),
                                static_cast<size_t>(k));
  };

  double sg = 0.0, sf = 0.0, sgb = 0.0, sfb = 0.0;
  for (int i = 1; i <= n_max; ++i) {
    sg += std::log(m.p(path.at_index(i - 1), path.at_index(i)));
    sf += fu.at(window(i - 1, ku));
    obs.xu[static_cast<size_t>(i)] = -sg - i * a;
    obs.yu[static_cast<size_t>(i)] = sf - i * b;

    sgb += std::log(m.p(path.at_index(-i), path.at_index(-i + 1)));
    sfb += fs.at(window(-(i - 1), ks));
    obs.xs[static_cast<size_t>(i)] = -sgb - i * a;
    obs.ys[static_cast<size_t>(i)] = sfb - i * b;
  }
  return obs;
}

CovarianceQ green_kubo_covariance(const MarkovMeasure& m, const LocallyConstantFn& fu,
                                  const LagPolicy& policy, ObsSide side,
                                  const LocallyConstantFn* fs) {
  if (fu.depth() > 2)
    throw Error(ErrorCode::Schema, "covariance needs depth <= 2; block-recode first");
  const int n = m.sft.n;
  const double a = shift_entropy(m);
  const double b = integrate(m, fu);

  // The stable side runs the reversed chain and reads observables on the
  // reversed pair orientation.
  std::vector<double> chain = side == ObsSide::Unstable ? m.P : reversed_chain(m);
  const LocallyConstantFn& f = (side == ObsSide::Stable && fs) ? *fs : fu;
  PairObs obs = build_pair_obs(m.sft, chain, f, a, b, side == ObsSide::Stable);

  auto pairw = [&](int i, int j) {
    return m.v[static_cast<size_t>(i)] * chain[static_cast<size_t>(i) * n + j];
  };

  CovarianceQ q;
  // Lag 0.
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (chain[static_cast<size_t>(i) * n + j] <= 0.0) continue;
      double w = pairw(i, j);
      double p1 = obs.phi1[static_cast<size_t>(i) * n + j];
      double p2 = obs.phi2[static_cast<size_t>(i) * n + j];
      q.q[0][0] += w * p1 * p1;
      q.q[0][1] += w * p1 * p2;
      q.q[1][1] += w * p2 * p2;
    }
  q.q[1][0] = q.q[0][1];

  // chi_a[j] = sum_i v_i P_ij phi_a(i,j);  psi_b[l] = sum_m P_lm phi_b(l,m).
  std::vector<double> chi1(static_cast<size_t>(n), 0.0), chi2(static_cast<size_t>(n), 0.0);
  std::vector<double> w1(static_cast<size_t>(n), 0.0), w2(static_cast<size_t>(n), 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (chain[static_cast<size_t>(i) * n + j] <= 0.0) continue;
      double w = pairw(i, j);
      chi1[static_cast<size_t>(j)] += w * obs.phi1[static_cast<size_t>(i) * n + j];
      chi2[static_cast<size_t>(j)] += w * obs.phi2[static_cast<size_t>(i) * n + j];
      w1[static_cast<size_t>(i)] += chain[static_cast<size_t>(i) * n + j] * obs.phi1[static_cast<size_t>(i) * n + j];
      w2[static_cast<size_t>(i)] += chain[static_cast<size_t>(i) * n + j] * obs.phi2[static_cast<size_t>(i) * n + j];
    }

  SquareMat P(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) P.at(i, j) = chain[static_cast<size_t>(i) * n + j];

  q.lag_used = 0;
  q.truncation_residual = 0.0;
  std::vector<double> r1 = w1, r2 = w2;  // P^{k-1} psi
  for (int k = 1; k <= policy.max_lag; ++k) {
    double c11 = 0.0, c12 = 0.0, c21 = 0.0, c22 = 0.0;
    for (int j = 0; j < n; ++j) {
      c11 += chi1[static_cast<size_t>(j)] * r1[static_cast<size_t>(j)];
      c12 += chi1[static_cast<size_t>(j)] * r2[static_cast<size_t>(j)];
      c21 += chi2[static_cast<size_t>(j)] * r1[static_cast<size_t>(j)];
      c22 += chi2[static_cast<size_t>(j)] * r2[static_cast<size_t>(j)];
    }
    // C_k + C_k^T added symmetrically.
    double inc00 = 2.0 * c11;
    double inc01 = c12 + c21;
    double inc11 = 2.0 * c22;
    q.q[0][0] += inc00;
    q.q[0][1] += inc01;
    q.q[1][0] += inc01;
    q.q[1][1] += inc11;
    double frob = std::sqrt(inc00 * inc00 + 2.0 * inc01 * inc01 + inc11 * inc11);
    q.lag_used = k;
    q.truncation_residual = frob;
    if (frob < policy.increment_tol) break;
    r1 = mat_vec(P, r1);
    r2 = mat_vec(P, r2);
  }

  // Numerical PSD guard.
  double tr = q.trace();
  double det = q.det();
  double disc = std::sqrt(std::fmax(0.0, tr * tr - 4.0 * det));
  double lam_min = 0.5 * (tr - disc);
  if (lam_min < -1e-10)
    throw Error(ErrorCode::Numeric, "covariance matrix lost positive semidefiniteness");
  return q;
}

CoboundaryVerdict coboundary_test(const Sft& sft, const LocallyConstantFn& fn, double mean,
                                  int l_max) {
  if (l_max < 2) throw Error(ErrorCode::Schema, "l_max must be >= 2");
  CoboundaryVerdict v;
  for (const auto& c : enumerate_cycles(sft, l_max)) {
    double s = cyclic_birkhoff_sum(fn, c) - mean * c.size();
    v.max_abs_sum = std::fmax(v.max_abs_sum, std::fabs(s));
    if (v.is_degenerate && std::fabs(s) > 1e-10) {
      v.is_degenerate = false;
      v.witness = c;
      v.witness_sum = s;
    }
  }
  return v;
}

NonsingularityReport nonsingularity_check(const MarkovMeasure& m, const LocallyConstantFn& fu,
                                          int l_max) {
  NonsingularityReport rep;
  const double a = shift_entropy(m);
  const double b = integrate(m, fu);
  LocallyConstantFn g = potential_G(m);

  // Gram matrix of the per-orbit vectors; its eigenvalues are the squared
  // singular values of the stacked cycle matrix.
  double s11 = 0.0, s12 = 0.0, s22 = 0.0;
  for (const auto& c : enumerate_cycles(m.sft, l_max)) {
    double x = -cyclic_birkhoff_sum(g, c) - a * c.size();
    double y = cyclic_birkhoff_sum(fu, c) - b * c.size();
    s11 += x * x;
    s12 += x * y;
    s22 += y * y;
  }
  double tr = s11 + s22;
  double det = s11 * s22 - s12 * s12;
  double disc = std::sqrt(std::fmax(0.0, tr * tr - 4.0 * det));
  double lam1 = 0.5 * (tr + disc);
  double lam2 = 0.5 * (tr - disc);
  double sig1 = std::sqrt(std::fmax(0.0, lam1));
  double sig2 = std::sqrt(std::fmax(0.0, lam2));
  double rank_tol = 1e-9 * std::fmax(1.0, sig1);
  rep.rank_cycles = (sig1 > rank_tol ? 1 : 0) + (sig2 > rank_tol ? 1 : 0);

  rep.q = green_kubo_covariance(m, fu);
  rep.det_q = rep.q.det();
  double qtr = rep.q.trace();
  rep.nonsingular = rep.rank_cycles == 2 && rep.det_q > 1e-12 * qtr * qtr;
  return rep;
}

PathSnapshots simulate_snapshots(const MarkovMeasure& m, const LocallyConstantFn& fu,
                                 const LocallyConstantFn& fs,
                                 const std::vector<int32_t>& n_grid, int64_t samples,
                                 uint64_t seed, const KernelOptions& opts) {
  ChainTables tables = ChainTables::build(m, &fu, &fs);
  PathSnapshots out;
  out.n_grid = n_grid;
  out.samples = samples;
  size_t total = n_grid.size() * static_cast<size_t>(samples);
  out.sg_f.assign(total, 0.0);
  out.sf_f.assign(total, 0.0);
  out.sg_b.assign(total, 0.0);
  out.sf_b.assign(total, 0.0);
  SnapshotRequest req;
  req.tables = &tables;
  req.n_grid = n_grid;
  req.samples = samples;
  req.seed = seed;
  run_snapshots(req, SnapshotBuffers{out.sg_f.data(), out.sf_f.data(), out.sg_b.data(),
                                     out.sf_b.data()},
                opts);
  return out;
}

TailEventStats asip_harness(const MarkovMeasure& m, const LocallyConstantFn& fu,
                            const LocallyConstantFn& fs,
                            const std::vector<int32_t>& n_grid, int64_t samples,
                            double d, double c_tilde, uint64_t seed,
                            const KernelOptions& opts) {
  TailEventStats stats;
  stats.n_grid = n_grid;
  stats.samples = samples;
  stats.d = d;
  stats.c_tilde = c_tilde;

  const double a = shift_entropy(m);
  const double b = integrate(m, fu);
  CovarianceQ q = green_kubo_covariance(m, fu);
  stats.q_near_singular = !(q.det() > 1e-12 * q.trace() * q.trace());

  const size_t g_count = n_grid.size();
  stats.freq_u.assign(g_count, 0.0);
  stats.freq_s.assign(g_count, 0.0);
  stats.freq_joint.assign(g_count, 0.0);
  stats.rho_pred.assign(g_count, 0.0);

  for (size_t g = 0; g < g_count; ++g) {
    double n = static_cast<double>(n_grid[g]);
    CovarianceQ qn = q;
    qn.q[0][0] *= n;
    qn.q[0][1] *= n;
    qn.q[1][0] *= n;
    qn.q[1][1] *= n;
    stats.rho_pred[g] = bivariate_normal_tail(qn, -d * std::sqrt(n), c_tilde);
  }

  if (samples <= 0) return stats;
  PathSnapshots snaps = simulate_snapshots(m, fu, fs, n_grid, samples, seed, opts);
  for (size_t g = 0; g < g_count; ++g) {
    double n = static_cast<double>(n_grid[g]);
    double x_cut = -n * a + d * std::sqrt(n);  // sg >= x_cut  <=>  X_n <= na - D sqrt(n)
    double y_cut = n * b + c_tilde;
    int64_t cu = 0, cs = 0, cj = 0;
    const double* sgf = snaps.sg_f.data() + g * static_cast<size_t>(samples);
    const double* sff = snaps.sf_f.data() + g * static_cast<size_t>(samples);
    const double* sgb = snaps.sg_b.data() + g * static_cast<size_t>(samples);
    const double* sfb = snaps.sf_b.data() + g * static_cast<size_t>(samples);
    for (int64_t s = 0; s < samples; ++s) {
      bool eu = sgf[s] >= x_cut && sff[s] >= y_cut;
      bool es = sgb[s] >= x_cut && sfb[s] >= y_cut;
      cu += eu ? 1 : 0;
      cs += es ? 1 : 0;
      cj += (eu && es) ? 1 : 0;
    }
    stats.freq_u[g] = static_cast<double>(cu) / static_cast<double>(samples);
    stats.freq_s[g] = static_cast<double>(cs) / static_cast<double>(samples);
    stats.freq_joint[g] = static_cast<double>(cj) / static_cast<double>(samples);
  }
  return stats;
}

double bivariate_normal_tail(const CovarianceQ& q, double x_hi, double y_lo) {
  const double s1 = std::sqrt(std::fmax(0.0, q.q[0][0]));
  const double s2 = std::sqrt(std::fmax(0.0, q.q[1][1]));
  auto upper_tail = [](double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); };
  auto lower_tail = [](double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); };

  if (s1 == 0.0) return (x_hi >= 0.0) ? (s2 == 0.0 ? (y_lo <= 0.0 ? 1.0 : 0.0)
                                                   : upper_tail(y_lo / s2))
                                      : 0.0;
  if (s2 == 0.0) return (y_lo <= 0.0) ? lower_tail(x_hi / s1) : 0.0;

  double rho = q.q[0][1] / (s1 * s2);
  if (rho > 1.0 - 1e-12 || rho < -1.0 + 1e-12) {
    // Degenerate: Y = rho (s2/s1) X almost surely.
    double slope = (rho > 0.0 ? 1.0 : -1.0) * s2 / s1;
    // P(X <= x_hi, slope * X >= y_lo)
    if (slope > 0.0) {
      double lo = y_lo / slope;
      return lo <= x_hi ? std::fmax(0.0, lower_tail(x_hi / s1) - lower_tail(lo / s1)) : 0.0;
    }
    double hi = y_lo / slope;  // X <= hi
    return lower_tail(std::fmin(x_hi, hi) / s1);
  }

  // P(X <= x_hi, Y >= y_lo) = int_{-inf}^{x_hi/s1} phi(z) Qbar(z) dz with
  // Qbar the conditional upper tail of Y given X = s1 z.
  const double z_hi = x_hi / s1;
  const double z_lo = z_hi - 40.0;
  const double cond = std::sqrt(1.0 - rho * rho);
  auto integrand = [&](double z) {
    double phi = std::exp(-0.5 * z * z) / std::sqrt(2.0 * 3.14159265358979323846);
    double mu = rho * s2 * z;
    return phi * upper_tail((y_lo - mu) / (s2 * cond));
  };
  // Composite Gauss-Legendre, 64 panels x 12 nodes.
  static const double gl_x[6] = {0.1252334085114689, 0.3678314989981802, 0.5873179542866175,
                                 0.7699026741943047, 0.9041172563704749, 0.9815606342467192};
  static const double gl_w[6] = {0.2491470458134028, 0.2334925365383548, 0.2031674267230659,
                                 0.1600783285433462, 0.1069393259953184, 0.0471753363865118};
  const int panels = 64;
  const double h = (z_hi - z_lo) / panels;
  double acc = 0.0;
  for (int p = 0; p < panels; ++p) {
    double c = z_lo + (p + 0.5) * h;
    double r = 0.5 * h;
    for (int k = 0; k < 6; ++k)
      acc += gl_w[k] * r * (integrand(c + r * gl_x[k]) + integrand(c - r * gl_x[k]));
  }
  return acc;
}

}  // namespace sftdim
