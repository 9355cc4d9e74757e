#include "sftdim/linalg.hpp"

#include <cmath>
#include <cstdlib>

#include "sftdim/errors.hpp"

namespace sftdim {

SquareMat mat_mul(const SquareMat& x, const SquareMat& y) {
  SquareMat r(x.n);
  for (int i = 0; i < x.n; ++i) {
    for (int k = 0; k < x.n; ++k) {
      double xik = x.at(i, k);
      if (xik == 0.0) continue;
      for (int j = 0; j < x.n; ++j) r.at(i, j) += xik * y.at(k, j);
    }
  }
  return r;
}

std::vector<double> mat_vec(const SquareMat& m, const std::vector<double>& x) {
  std::vector<double> r(m.n, 0.0);
  for (int i = 0; i < m.n; ++i) {
    double s = 0.0;
    for (int j = 0; j < m.n; ++j) s += m.at(i, j) * x[j];
    r[i] = s;
  }
  return r;
}

std::vector<double> vec_mat(const std::vector<double>& x, const SquareMat& m) {
  std::vector<double> r(m.n, 0.0);
  for (int j = 0; j < m.n; ++j) {
    double s = 0.0;
    for (int i = 0; i < m.n; ++i) s += x[i] * m.at(i, j);
    r[j] = s;
  }
  return r;
}

std::vector<double> solve_linear(SquareMat m, std::vector<double> b) {
  const int n = m.n;
  for (int col = 0; col < n; ++col) {
    int pivot = col;
    double best = std::fabs(m.at(col, col));
    for (int r = col + 1; r < n; ++r) {
      double v = std::fabs(m.at(r, col));
      if (v > best) {
        best = v;
        pivot = r;
      }
    }
    if (best == 0.0) throw Error(ErrorCode::Numeric, "singular linear system");
    if (pivot != col) {
      for (int j = 0; j < n; ++j) std::swap(m.at(col, j), m.at(pivot, j));
      std::swap(b[col], b[pivot]);
    }
    double d = m.at(col, col);
    for (int r = col + 1; r < n; ++r) {
      double f = m.at(r, col) / d;
      if (f == 0.0) continue;
      for (int j = col; j < n; ++j) m.at(r, j) -= f * m.at(col, j);
      b[r] -= f * b[col];
    }
  }
  std::vector<double> x(n, 0.0);
  for (int i = n - 1; i >= 0; --i) {
    double s = b[i];
    for (int j = i + 1; j < n; ++j) s -= m.at(i, j) * x[j];
    x[i] = s / m.at(i, i);
  }
  return x;
}

namespace {

void l1_normalize(std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += std::fabs(x);
  if (s <= 0.0) throw Error(ErrorCode::Numeric, "zero vector in Perron iteration");
  for (double& x : v) x /= s;
}

void scale_to_max_one(SquareMat& m) {
  double mx = 0.0;
  for (double x : m.a)
    if (x > mx) mx = x;
  if (mx <= 0.0) throw Error(ErrorCode::Numeric, "non-positive matrix in Perron iteration");
  for (double& x : m.a) x /= mx;
}

}  // namespace

PerronData perron_data(const SquareMat& m) {
  // Repeated squaring squares the subdominant ratio each pass, so 60 passes
  // exceed double precision for any primitive matrix.
  SquareMat b = m;
  scale_to_max_one(b);
  for (int pass = 0; pass < 60; ++pass) {
    b = mat_mul(b, b);
    scale_to_max_one(b);
  }
  std::vector<double> u(static_cast<size_t>(m.n), 1.0);
  u = mat_vec(b, u);
  l1_normalize(u);

  PerronData out;
  for (int refine = 0; refine < 64; ++refine) {
    std::vector<double> w = mat_vec(m, u);
    double lo = 0.0, hi = 0.0;
    bool first = true;
    for (int i = 0; i < m.n; ++i) {
      if (u[i] <= 0.0) throw Error(ErrorCode::Numeric, "Perron vector not positive");
      double ratio = w[i] / u[i];
      if (first) {
        lo = hi = ratio;
        first = false;
      } else {
        lo = std::fmin(lo, ratio);
        hi = std::fmax(hi, ratio);
      }
    }
    u = w;
    l1_normalize(u);
    out.rho = 0.5 * (lo + hi);
    if (hi - lo <= 1e-14 * std::fmax(1.0, hi)) break;
  }
  out.right = u;
  return out;
}

}  // namespace sftdim
