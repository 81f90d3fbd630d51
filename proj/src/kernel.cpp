#include "khl/kernel.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "khl/errors.hpp"

namespace khl {

namespace {

constexpr double kBallTolerance = 1e-9;

void check_spec(const KernelSpec& spec) {
  if (!(spec.nu > 0.0) || !(spec.nu < 1.0)) {
    throw std::invalid_argument("KernelSpec: nu must lie in (0, 1)");
  }
}

double kernel_value(const Point& x, const Point& y, double nu) {
  return 1.0 / (1.0 - nu * dot(x, y));
}

}  // namespace

double dot(const Point& a, const Point& b) {
  if (a.size() != b.size()) throw std::invalid_argument("dot: dimension mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm(const Point& a) { return std::sqrt(dot(a, a)); }

Point unit_ball_point(Point x) {
  double norm2 = 0.0;
  for (double c : x) {
    if (!std::isfinite(c)) throw std::domain_error("point has non-finite coordinate");
    norm2 += c * c;
  }
  const double n = std::sqrt(norm2);
  if (n > 1.0 + kBallTolerance) {
    throw std::domain_error("point norm " + std::to_string(n) + " exceeds the unit ball");
  }
  if (n > 1.0) {
    for (auto& c : x) c /= n;
  }
  return x;
}

double composed_kernel(const Point& x, const Point& y, const KernelSpec& spec) {
  check_spec(spec);
  return kernel_value(unit_ball_point(x), unit_ball_point(y), spec.nu);
}

GramMatrix gram(const std::vector<Point>& points, const KernelSpec& spec) {
  check_spec(spec);
  if (points.empty()) throw std::invalid_argument("gram: empty point list");

  std::vector<Point> normalized;
  normalized.reserve(points.size());
  for (const auto& p : points) normalized.push_back(unit_ball_point(p));

  const std::size_t m = normalized.size();
  GramMatrix g;
  g.size = m;
  g.spec = spec;
  g.entries.assign(m * m, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i; j < m; ++j) {
      const double v = kernel_value(normalized[i], normalized[j], spec.nu);
      g.entries[i * m + j] = v;
      g.entries[j * m + i] = v;
    }
  }
  return g;
}

double truncated_kernel(const Point& x, const Point& y, int degree) {
  if (degree < 0) throw std::invalid_argument("truncated_kernel: degree must be >= 0");
  const double half_t = 0.5 * dot(unit_ball_point(x), unit_ball_point(y));
  // Horner form of the partial geometric sum in (t/2).
  double s = 1.0;
  for (int j = 0; j < degree; ++j) s = 1.0 + half_t * s;
  return s;
}

std::vector<double> explicit_feature_map(const Point& x, int degree, std::size_t max_entries) {
  if (degree < 0) throw std::invalid_argument("explicit_feature_map: degree must be >= 0");
  const Point p = unit_ball_point(x);
  const std::size_t n = p.size();

  std::size_t total = 1;  // j = 0 entry
  std::size_t level = 1;
  for (int j = 1; j <= degree; ++j) {
    if (n == 0) break;
    if (level > max_entries / n) {
      throw resource_error("explicit_feature_map: output exceeds " +
                           std::to_string(max_entries) + " entries");
    }
    level *= n;
    if (total > max_entries - level) {
      throw resource_error("explicit_feature_map: output exceeds " +
                           std::to_string(max_entries) + " entries");
    }
    total += level;
  }

  std::vector<double> out;
  out.reserve(total);
  out.push_back(1.0);

  const double inv_sqrt2 = 1.0 / std::numbers::sqrt2;
  std::vector<double> prev{1.0};  // unscaled products at the previous level
  double scale = 1.0;             // 2^{-j/2}
  for (int j = 1; j <= degree; ++j) {
    scale *= inv_sqrt2;
    std::vector<double> cur;
    cur.reserve(prev.size() * n);
    for (double base : prev) {
      for (std::size_t k = 0; k < n; ++k) cur.push_back(base * p[k]);
    }
    for (double v : cur) out.push_back(scale * v);
    prev = std::move(cur);
  }
  return out;
}

std::vector<double> gram_eigenvalues(const GramMatrix& g) {
  using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  Eigen::Map<const RowMajor> k(g.entries.data(), static_cast<Eigen::Index>(g.size),
                               static_cast<Eigen::Index>(g.size));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(k, Eigen::EigenvaluesOnly);
  const auto& ev = solver.eigenvalues();
  return std::vector<double>(ev.data(), ev.data() + ev.size());
}

}  // namespace khl
