#pragma once

#include <cstddef>
#include <vector>

namespace sftdim {

// Dense square matrix, row-major. Sizes here are tiny (alphabet-sized), so
// everything below favors determinism and clarity over speed.
struct SquareMat {
  int n = 0;
  std::vector<double> a;

  SquareMat() = default;
  explicit SquareMat(int size) : n(size), a(static_cast<size_t>(size) * size, 0.0) {}

  double& at(int i, int j) { return a[static_cast<size_t>(i) * n + j]; }
  double at(int i, int j) const { return a[static_cast<size_t>(i) * n + j]; }
};

SquareMat mat_mul(const SquareMat& x, const SquareMat& y);
std::vector<double> mat_vec(const SquareMat& m, const std::vector<double>& x);
std::vector<double> vec_mat(const std::vector<double>& x, const SquareMat& m);

// Solves m x = b by Gaussian elimination with partial pivoting.
// Throws Error(Numeric) on a (numerically) singular system.
std::vector<double> solve_linear(SquareMat m, std::vector<double> b);

// Perron data of a primitive nonnegative matrix: spectral radius and the
// right eigenvector (L1-normalized, positive). Convergence is driven by
// repeated squaring, so even nearly-degenerate spectra settle; a fixed
// iteration cap plus a 1e-14 ratio spread guard keeps it deterministic.
struct PerronData {
  double rho = 0.0;
  std::vector<double> right;
};
PerronData perron_data(const SquareMat& m);

}  // namespace sftdim
