#include "pseudospec/geometry.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include <Eigen/Dense>

namespace pseudospec {

SimplexWeights::SimplexWeights(std::vector<double> t) : t_(std::move(t)) {
  if (t_.empty()) throw std::invalid_argument("SimplexWeights: empty");
  if (std::any_of(t_.begin(), t_.end(), [](double v) { return !(v >= 0.0); })) {
    throw std::invalid_argument("SimplexWeights: negative weight");
  }
  const double sum = std::accumulate(t_.begin(), t_.end(), 0.0);
  if (std::abs(sum - 1.0) > 1e-12) throw std::invalid_argument("SimplexWeights: sum is not 1");
}

namespace {

std::size_t common_dimension(std::span<const Point> points) {
  if (points.empty()) throw std::invalid_argument("empty point list");
  const std::size_t d = points[0].size();
  for (const auto& p : points) {
    if (p.size() != d) throw std::invalid_argument("inconsistent point dimensions");
  }
  return d;
}

// Dense tableau for: min 1^T a  s.t.  A t + a = b, t >= 0, a >= 0, b >= 0.
// Columns 0..m-1 are t, columns m..m+r-1 are artificials.
class PhaseOneSimplex {
 public:
  PhaseOneSimplex(const Eigen::MatrixXd& a, const Eigen::VectorXd& b)
      : r_(static_cast<int>(a.rows())), m_(static_cast<int>(a.cols())),
        tab_(Eigen::MatrixXd::Zero(r_ + 1, m_ + r_ + 1)), basis_(r_) {
    tab_.topLeftCorner(r_, m_) = a;
    tab_.block(0, m_, r_, r_).setIdentity();
    tab_.col(m_ + r_).head(r_) = b;
    for (int i = 0; i < r_; ++i) basis_[i] = m_ + i;
    // Reduced costs with all artificials basic: c_j - sum_i row_i.
    for (int j = 0; j < m_ + r_ + 1; ++j) {
      const double cost = (j >= m_ && j < m_ + r_) ? 1.0 : 0.0;
      tab_(r_, j) = cost - tab_.col(j).head(r_).sum();
    }
    tab_(r_, m_ + r_) = -b.sum();
  }

  void solve() {
    constexpr double kEps = 1e-11;
    const int rhs = m_ + r_;
    for (int guard = 0; guard < 100'000; ++guard) {
      int enter = -1;
      for (int j = 0; j < m_ + r_; ++j) {
        if (tab_(r_, j) < -kEps) {
          enter = j;
          break;
        }
      }
      if (enter < 0) return;
      int leave = -1;
      double best = std::numeric_limits<double>::infinity();
      for (int i = 0; i < r_; ++i) {
        const double coef = tab_(i, enter);
        if (coef <= kEps) continue;
        const double ratio = tab_(i, rhs) / coef;
        if (leave < 0 || ratio < best - 1e-14) {
          best = ratio;
          leave = i;
        } else if (ratio <= best + 1e-14 && basis_[i] < basis_[leave]) {
          leave = i;
        }
      }
      if (leave < 0) return;  // unbounded direction; cannot happen in phase 1
      pivot(leave, enter);
    }
    throw std::runtime_error("PhaseOneSimplex: iteration limit");
  }

  double objective() const { return -tab_(r_, m_ + r_); }

  std::vector<double> primal() const {
    std::vector<double> t(m_, 0.0);
    for (int i = 0; i < r_; ++i) {
      if (basis_[i] < m_) t[basis_[i]] = std::max(0.0, tab_(i, m_ + r_));
    }
    return t;
  }

  /// Dual multipliers y = c_B B^{-1}, read from the artificial columns.
  Eigen::VectorXd dual() const {
    Eigen::VectorXd y(r_);
    for (int i = 0; i < r_; ++i) y(i) = 1.0 - tab_(r_, m_ + i);
    return y;
  }

 private:
  void pivot(int row, int col) {
    tab_.row(row) /= tab_(row, col);
    for (int i = 0; i <= r_; ++i) {
      if (i == row) continue;
      const double f = tab_(i, col);
      if (f != 0.0) tab_.row(i) -= f * tab_.row(row);
    }
    basis_[row] = col;
  }

  int r_;
  int m_;
  Eigen::MatrixXd tab_;
  std::vector<int> basis_;
};

// Wolfe's minimum-norm point of conv(columns of p).
Eigen::VectorXd min_norm_point(const Eigen::MatrixXd& p) {
  const int m = static_cast<int>(p.cols());
  const double scale = p.colwise().squaredNorm().maxCoeff();
  const double eps = 1e-12 * std::max(1.0, scale);

  int start = 0;
  p.colwise().squaredNorm().minCoeff(&start);
  std::vector<int> s{start};
  std::vector<double> lambda{1.0};
  Eigen::VectorXd x = p.col(start);

  for (int major = 0; major < 10 * m + 100; ++major) {
    int j = 0;
    (p.transpose() * x).minCoeff(&j);
    if (x.squaredNorm() - p.col(j).dot(x) <= eps) break;
    if (std::find(s.begin(), s.end(), j) != s.end()) break;
    s.push_back(j);
    lambda.push_back(0.0);

    for (int minor = 0; minor < 10 * m + 100; ++minor) {
      const int k = static_cast<int>(s.size());
      Eigen::MatrixXd sub(p.rows(), k);
      for (int i = 0; i < k; ++i) sub.col(i) = p.col(s[i]);
      // Affine minimizer: [S^T S, 1; 1^T, 0] [mu; nu] = [0; 1].
      Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(k + 1, k + 1);
      kkt.topLeftCorner(k, k) = sub.transpose() * sub;
      kkt.block(0, k, k, 1).setOnes();
      kkt.block(k, 0, 1, k).setOnes();
      Eigen::VectorXd rhs = Eigen::VectorXd::Zero(k + 1);
      rhs(k) = 1.0;
      const Eigen::VectorXd sol = kkt.completeOrthogonalDecomposition().solve(rhs);
      const Eigen::VectorXd mu = sol.head(k);

      if ((mu.array() > 1e-14).all()) {
        lambda.assign(mu.data(), mu.data() + k);
        x = sub * mu;
        break;
      }
      double theta = 1.0;
      for (int i = 0; i < k; ++i) {
        if (mu(i) <= 1e-14 && lambda[i] - mu(i) > 0.0) {
          theta = std::min(theta, lambda[i] / (lambda[i] - mu(i)));
        }
      }
      for (int i = 0; i < k; ++i) lambda[i] += theta * (mu(i) - lambda[i]);
      std::vector<int> keep_s;
      std::vector<double> keep_l;
      for (int i = 0; i < k; ++i) {
        if (lambda[i] > 1e-14) {
          keep_s.push_back(s[i]);
          keep_l.push_back(lambda[i]);
        }
      }
      s = std::move(keep_s);
      lambda = std::move(keep_l);
      const double total = std::accumulate(lambda.begin(), lambda.end(), 0.0);
      x.setZero();
      for (std::size_t i = 0; i < s.size(); ++i) x += (lambda[i] / total) * p.col(s[i]);
    }
  }
  return x;
}

}  // namespace

Point caratheodory_combine(std::span<const Point> points, const SimplexWeights& t) {
  const std::size_t d = common_dimension(points);
  if (t.size() != points.size()) {
    throw std::invalid_argument("caratheodory_combine: weight count differs from point count");
  }
  Point out(d, 0.0);
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (std::size_t k = 0; k < d; ++k) out[k] += t.values()[i] * points[i][k];
  }
  return out;
}

HullMembership hull_membership(std::span<const double> x, std::span<const Point> points,
                               double tol) {
  const std::size_t d = common_dimension(points);
  if (x.size() != d) throw std::invalid_argument("hull_membership: dimension mismatch");
  const int r = static_cast<int>(d) + 1;
  const int m = static_cast<int>(points.size());
  Eigen::MatrixXd a(r, m);
  Eigen::VectorXd b(r);
  for (int j = 0; j < m; ++j) {
    for (std::size_t k = 0; k < d; ++k) a(static_cast<int>(k), j) = points[j][k];
    a(r - 1, j) = 1.0;
  }
  for (std::size_t k = 0; k < d; ++k) b(static_cast<int>(k)) = x[k];
  b(r - 1) = 1.0;
  // Flip rows so that b >= 0; the dual is mapped back through the same signs.
  Eigen::VectorXd sign = Eigen::VectorXd::Ones(r);
  for (int i = 0; i < r; ++i) {
    if (b(i) < 0) {
      sign(i) = -1.0;
      a.row(i) *= -1.0;
      b(i) = -b(i);
    }
  }

  PhaseOneSimplex lp(a, b);
  lp.solve();
  HullMembership out;
  out.infeasibility = std::max(0.0, lp.objective());
  if (out.infeasibility <= tol) {
    out.inside = true;
    out.weights = lp.primal();
    return out;
  }
  const Eigen::VectorXd y = sign.cwiseProduct(lp.dual());
  Eigen::VectorXd s = y.head(static_cast<int>(d));
  if (s.norm() > 0) s.normalize();
  out.separator.assign(s.data(), s.data() + s.size());
  return out;
}

double distance_to_hull(std::span<const double> x, std::span<const Point> points) {
  const std::size_t d = common_dimension(points);
  if (x.size() != d) throw std::invalid_argument("distance_to_hull: dimension mismatch");
  if (hull_membership(x, points, 1e-12).inside) return 0.0;
  Eigen::MatrixXd shifted(static_cast<int>(d), static_cast<int>(points.size()));
  for (std::size_t j = 0; j < points.size(); ++j) {
    for (std::size_t k = 0; k < d; ++k) {
      shifted(static_cast<int>(k), static_cast<int>(j)) = points[j][k] - x[k];
    }
  }
  return min_norm_point(shifted).norm();
}

double hull_distance(std::span<const Point> a, std::span<const Point> b) {
  if (common_dimension(a) != common_dimension(b)) {
    throw std::invalid_argument("hull_distance: dimension mismatch");
  }
  double worst = 0.0;
  for (const auto& p : a) worst = std::max(worst, distance_to_hull(p, b));
  for (const auto& p : b) worst = std::max(worst, distance_to_hull(p, a));
  return worst;
}

}  // namespace pseudospec
