#include "support.h"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

namespace pseudospec::testing {

namespace {

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

int uniform_int(std::mt19937_64& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

Polynomial shifted_variable(int n, int i, double c) {
  return Polynomial::variable(n, i) - Polynomial::constant(n, c);
}

}  // namespace

RandomSystem random_system(std::mt19937_64& rng, int max_n, int max_degree,
                           int max_constraints) {
  RandomSystem out;
  const int n = uniform_int(rng, 1, max_n);
  out.feasible.resize(n);
  for (auto& v : out.feasible) v = uniform(rng, -1.5, 1.5);
  out.sys.nvars = n;
  out.sys.var_names = default_var_names(n);

  const int m = uniform_int(rng, 1, max_constraints);
  for (int c = 0; c < m; ++c) {
    Polynomial p(n);
    const int terms = uniform_int(rng, 1, 4);
    for (int t = 0; t < terms; ++t) {
      const int deg = (c == 0 && t == 0) ? uniform_int(rng, std::min(3, max_degree), max_degree)
                                         : uniform_int(rng, 0, max_degree);
      Exponents e(n, 0);
      for (int d = 0; d < deg; ++d) ++e[uniform_int(rng, 0, n - 1)];
      p.add_term(e, uniform(rng, -2.0, 2.0));
    }
    const auto rel = static_cast<Relation>(uniform_int(rng, 0, 4));
    const double value = p.eval(out.feasible);
    const double margin = uniform(rng, 0.1, 1.0);
    switch (rel) {
      case Relation::kEq:
        p.add_term(Exponents(n, 0), -value);
        break;
      case Relation::kGt:
      case Relation::kGe:
        if (value < margin) p.add_term(Exponents(n, 0), margin - value);
        break;
      case Relation::kLt:
      case Relation::kLe:
        if (value > -margin) p.add_term(Exponents(n, 0), -margin - value);
        break;
    }
    out.sys.constraints.push_back({std::move(p), rel});
  }
  return out;
}

RandomSystem random_strict_quadratic(std::mt19937_64& rng, int max_n) {
  RandomSystem out;
  const int n = uniform_int(rng, 1, max_n);
  out.feasible.resize(n);
  for (auto& v : out.feasible) v = uniform(rng, -1.0, 1.0);
  out.sys.nvars = n;
  out.sys.var_names = default_var_names(n);

  std::vector<Polynomial> d;
  for (int i = 0; i < n; ++i) d.push_back(shifted_variable(n, i, out.feasible[i]));

  Polynomial ball = Polynomial::constant(n, 1.0);
  for (const auto& di : d) ball -= di * di;
  out.sys.constraints.push_back({ball, Relation::kGt});

  const int extra = uniform_int(rng, 1, 3);
  for (int c = 0; c < extra; ++c) {
    Polynomial f = Polynomial::constant(n, 1.0);
    for (int i = 0; i < n; ++i) {
      f += uniform(rng, -0.5, 0.5) * d[i];
      for (int j = i; j < n; ++j) f += uniform(rng, -1.0, 1.0) * (d[i] * d[j]);
    }
    out.sys.constraints.push_back({f, Relation::kGt});
  }
  if (n >= 2 && uniform_int(rng, 0, 1) == 1) {
    Polynomial g(n);
    std::vector<double> a(n);
    double norm = 0.0;
    while (norm < 0.5) {
      norm = 0.0;
      for (auto& v : a) {
        v = uniform(rng, -1.0, 1.0);
        norm += v * v;
      }
      norm = std::sqrt(norm);
    }
    for (int i = 0; i < n; ++i) {
      g += a[i] * d[i];
      for (int j = i; j < n; ++j) g += uniform(rng, -0.3, 0.3) * (d[i] * d[j]);
    }
    out.sys.constraints.push_back({g, Relation::kEq});
  }
  return out;
}

std::vector<Point> uniform_samples(std::mt19937_64& rng, int n, int count, double lo, double hi) {
  std::vector<Point> out(count, Point(n));
  for (auto& p : out) {
    for (auto& v : p) v = uniform(rng, lo, hi);
  }
  return out;
}

std::vector<Point> example2_rank_one_oracle() {
  auto residual = [](const Eigen::Vector3d& w) {
    return Eigen::Vector3d(w(0) * w(0) - w(1) * w(2) - 1.0, w(1) * w(1) + w(0) * w(2) - 1.0,
                           w(2) * w(2) - w(0) * w(1) - 1.0);
  };
  auto jacobian = [](const Eigen::Vector3d& w) {
    Eigen::Matrix3d j;
    j << 2 * w(0), -w(2), -w(1),
         w(2), 2 * w(1), w(0),
         -w(1), -w(0), 2 * w(2);
    return j;
  };

  std::vector<Point> found;
  const double h = 0.1;
  for (int a = 0; a <= 40; ++a) {
    for (int b = 0; b <= 40; ++b) {
      for (int c = 0; c <= 40; ++c) {
        Eigen::Vector3d w(-2.0 + a * h, -2.0 + b * h, -2.0 + c * h);
        if (residual(w).cwiseAbs().maxCoeff() > 0.3) continue;
        for (int it = 0; it < 50 && residual(w).cwiseAbs().maxCoeff() > 1e-15; ++it) {
          w -= jacobian(w).fullPivLu().solve(residual(w));
        }
        if (!(residual(w).cwiseAbs().maxCoeff() <= 1e-13)) continue;
        const Point x = {w(1) * w(2), w(0) * w(2), w(0) * w(1)};
        const bool seen = std::any_of(found.begin(), found.end(), [&](const Point& p) {
          return std::abs(p[0] - x[0]) + std::abs(p[1] - x[1]) + std::abs(p[2] - x[2]) < 1e-8;
        });
        if (!seen) found.push_back(x);
      }
    }
  }
  std::sort(found.begin(), found.end());
  return found;
}

std::vector<Point> example1_region_samples(std::mt19937_64& rng, int count) {
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<Point> out;
  for (int s = 0; s < count; ++s) {
    const int rank = uniform_int(rng, 1, 2);
    Eigen::MatrixXd f(2, rank);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < rank; ++j) f(i, j) = g(rng);
    const Eigen::Matrix2d x = f * f.transpose() / (f * f.transpose()).trace();
    out.push_back({x(0, 0), x(0, 1)});
  }
  return out;
}

Point rounded(const Point& p, double step) {
  Point out(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) out[i] = std::round(p[i] / step) * step + 0.0;
  return out;
}

}  // namespace pseudospec::testing
