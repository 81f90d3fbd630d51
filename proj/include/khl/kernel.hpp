#pragma once

#include <cstddef>
#include <vector>

namespace khl {

// A point of the base space, constrained to the unit ball.
using Point = std::vector<double>;

enum class BaseKernel { LinearDot };

// Composition parameter for K(x, x') = 1 / (1 - nu <x, x'>). nu must lie in
// (0, 1) so the denominator stays positive on the unit ball. The base inner
// product is an extension point; only the literal dot product ships.
struct KernelSpec {
  BaseKernel base = BaseKernel::LinearDot;
  double nu = 0.5;
};

struct GramMatrix {
  std::size_t size = 0;
  std::vector<double> entries;  // row-major size x size
  KernelSpec spec;

  double at(std::size_t i, std::size_t j) const { return entries[i * size + j]; }
};

double dot(const Point& a, const Point& b);
double norm(const Point& a);

// Enforces the unit-ball contract: norms up to 1 + 1e-9 are renormalized
// silently, anything longer (or non-finite) is a domain error.
Point unit_ball_point(Point x);

// K(x, y) = 1 / (1 - nu <x, y>); range [1/(1+nu), 1/(1-nu)] on the unit ball.
double composed_kernel(const Point& x, const Point& y, const KernelSpec& spec = {});

GramMatrix gram(const std::vector<Point>& points, const KernelSpec& spec = {});

// Partial geometric sum  sum_{j=0..degree} 2^-j <x, y>^j, the nu = 1/2
// expansion of the composed kernel; off by at most 2^-degree on the ball.
double truncated_kernel(const Point& x, const Point& y, int degree);

// The explicit feature map behind truncated_kernel: one entry
// 2^{-j/2} x_{k_1} ... x_{k_j} per tuple (k_1, ..., k_j), j = 0..degree.
// Intended as a small-dimension test oracle; output size is capped.
std::vector<double> explicit_feature_map(const Point& x, int degree,
                                         std::size_t max_entries = 10'000'000);

// Eigenvalues of the Gram matrix in ascending order.
std::vector<double> gram_eigenvalues(const GramMatrix& g);

}  // namespace khl
