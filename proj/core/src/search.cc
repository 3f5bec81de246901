#include "pseudospec/search.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <thread>

namespace pseudospec {

namespace {

SymMatrix from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  const int n = static_cast<int>(rows.size());
  Eigen::MatrixXd m(n, n);
  int i = 0;
  for (const auto& row : rows) {
    int j = 0;
    for (double v : row) m(i, j++) = v;
    ++i;
  }
  return SymMatrix::from_dense(m, 0.0);
}

double spectral_norm(const SymMatrix& m) {
  const Eigen::VectorXd ev = eigh(m).values;
  return ev.cwiseAbs().maxCoeff();
}

unsigned worker_count(unsigned requested, std::size_t work) {
  unsigned t = requested ? requested : std::max(1u, std::thread::hardware_concurrency());
  return static_cast<unsigned>(std::min<std::size_t>(t, std::max<std::size_t>(1, work)));
}

// Runs fn(begin, end, worker) over [0, total) split into contiguous chunks.
template <typename Fn>
void parallel_chunks(std::size_t total, unsigned workers, Fn fn) {
  if (workers <= 1) {
    fn(std::size_t{0}, total, 0u);
    return;
  }
  std::vector<std::jthread> pool;
  const std::size_t chunk = (total + workers - 1) / workers;
  for (unsigned w = 0; w < workers; ++w) {
    const std::size_t begin = std::min(total, w * chunk);
    const std::size_t end = std::min(total, begin + chunk);
    pool.emplace_back([=, &fn] { fn(begin, end, w); });
  }
}

struct Refined {
  bool ok = false;
  Point x;
  Eigen::VectorXd w;
};

// Newton (least-squares steps) on M(x) - w w^T = 0 over the upper triangle.
Refined refine_factored(const MatrixPencil& pencil, const Point& start) {
  const int d = pencil.dimension();
  const int n = pencil.size();
  const int eqs = n * (n + 1) / 2;

  std::vector<Eigen::MatrixXd> params;
  for (const auto& p : pencil.params) params.push_back(p.dense());

  Refined out;
  Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(start.data(), d);
  const EigenDecomposition e = eigh(pencil.at(start));
  if (!(e.values(n - 1) > 0.0)) return out;
  Eigen::VectorXd w = std::sqrt(e.values(n - 1)) * e.vectors.col(n - 1);

  Eigen::VectorXd f(eqs);
  Eigen::MatrixXd jac(eqs, d + n);
  for (int it = 0; it < 60; ++it) {
    Point xp(x.data(), x.data() + d);
    const Eigen::MatrixXd m = pencil.at(xp).dense();
    jac.setZero();
    int row = 0;
    for (int i = 0; i < n; ++i) {
      for (int j = i; j < n; ++j) {
        f(row) = m(i, j) - w(i) * w(j);
        for (int k = 0; k < d; ++k) jac(row, k) = params[k](i, j);
        jac(row, d + i) -= w(j);
        jac(row, d + j) -= w(i);
        ++row;
      }
    }
    const double scale = 1.0 + m.norm();
    if (f.lpNorm<Eigen::Infinity>() <= 1e-14 * scale) {
      out.ok = true;
      break;
    }
    const Eigen::VectorXd step = jac.completeOrthogonalDecomposition().solve(-f);
    if (!step.allFinite()) return out;
    x += step.head(d);
    w += step.tail(n);
    if (x.norm() > 1e8) return out;
    if (it == 59) out.ok = f.lpNorm<Eigen::Infinity>() <= 1e-11 * scale;
  }
  out.x.assign(x.data(), x.data() + d);
  canonicalize_sign(w);
  out.w = w;
  return out;
}

bool in_box(const Point& x, const Box& box) {
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double slack = 1e-9 * (1.0 + std::abs(box[i].first) + std::abs(box[i].second));
    if (x[i] < box[i].first - slack || x[i] > box[i].second + slack) return false;
  }
  return true;
}

double distance(const Point& a, const Point& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

// Flattened polynomial for repeated evaluation in inner loops.
class FlatPoly {
 public:
  explicit FlatPoly(const Polynomial& p) {
    for (const auto& [e, c] : p.terms()) {
      Term t{c, {}};
      for (std::size_t i = 0; i < e.size(); ++i) {
        if (e[i] > 0) t.factors.emplace_back(static_cast<int>(i), e[i]);
      }
      terms_.push_back(std::move(t));
    }
  }

  double eval(const double* x) const {
    double sum = 0.0;
    for (const auto& t : terms_) {
      double v = t.coef;
      for (const auto& [var, pow] : t.factors) {
        for (int k = 0; k < pow; ++k) v *= x[var];
      }
      sum += v;
    }
    return sum;
  }

 private:
  struct Term {
    double coef;
    std::vector<std::pair<int, int>> factors;
  };
  std::vector<Term> terms_;
};

}  // namespace

MatrixPencil example1_pencil() {
  MatrixPencil p;
  p.base = from_rows({{0, 0}, {0, 1}});
  p.params = {from_rows({{1, 0}, {0, -1}}), from_rows({{0, 1}, {1, 0}})};
  return p;
}

MatrixPencil example2_pencil() {
  MatrixPencil p;
  p.base = SymMatrix::identity(3);
  p.params = {
      from_rows({{1, 0, 0}, {0, 0, 1}, {0, 1, 0}}),
      from_rows({{0, 0, 1}, {0, -1, 0}, {1, 0, 0}}),
      from_rows({{0, 1, 0}, {1, 0, 0}, {0, 0, 1}}),
  };
  return p;
}

bool is_rank_one_point(const MatrixPencil& pencil, std::span<const double> x, double tol) {
  const SymMatrix m = pencil.at(x);
  const int n = m.size();
  const Eigen::VectorXd ev = eigh(m).values;
  const double scale = 1.0 + m.frobenius_norm();
  const double second = n >= 2 ? ev(n - 2) : 0.0;
  return ev(0) >= -tol * scale && second <= tol * scale && ev(n - 1) > tol * scale;
}

RankOneLocus enumerate_rank_one(const MatrixPencil& pencil, const Box& box,
                                const EnumerateOptions& opts) {
  pencil.validate();
  const int d = pencil.dimension();
  const int n = pencil.size();
  if (d < 1 || d > 3) throw std::invalid_argument("enumerate_rank_one: need 1 to 3 parameters");
  if (static_cast<int>(box.size()) != d) {
    throw std::invalid_argument("enumerate_rank_one: box dimension mismatch");
  }
  if (!(opts.grid_res > 0.0)) throw std::invalid_argument("enumerate_rank_one: grid_res <= 0");

  std::vector<std::size_t> counts(d);
  std::size_t total = 1;
  for (int i = 0; i < d; ++i) {
    if (box[i].second < box[i].first) throw std::invalid_argument("enumerate_rank_one: empty box");
    counts[i] = static_cast<std::size_t>(
                    std::floor((box[i].second - box[i].first) / opts.grid_res + 1e-9)) + 1;
    total *= counts[i];
  }
  double lipschitz = 0.0;
  for (const auto& p : pencil.params) lipschitz += spectral_norm(p);
  // Largest eigenvalue drift between a root and its nearest grid point.
  const double radius = 1.01 * lipschitz * opts.grid_res * std::sqrt(double(d)) / 2.0 + 1e-12;

  const unsigned workers = worker_count(opts.threads, total);
  std::vector<std::vector<Point>> flagged(workers);
  parallel_chunks(total, workers, [&](std::size_t begin, std::size_t end, unsigned w) {
    Point x(d);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    for (std::size_t idx = begin; idx < end; ++idx) {
      std::size_t rest = idx;
      for (int i = d - 1; i >= 0; --i) {
        x[i] = box[i].first + static_cast<double>(rest % counts[i]) * opts.grid_res;
        rest /= counts[i];
      }
      es.compute(pencil.at(x).dense(), Eigen::EigenvaluesOnly);
      const Eigen::VectorXd& ev = es.eigenvalues();
      const double second = n >= 2 ? ev(n - 2) : 0.0;
      if (ev(0) >= -radius && second <= radius && ev(n - 1) > 0.0) flagged[w].push_back(x);
    }
  });
  std::vector<Point> candidates;
  for (auto& f : flagged) candidates.insert(candidates.end(), f.begin(), f.end());

  std::vector<Refined> refined(candidates.size());
  parallel_chunks(candidates.size(), worker_count(opts.threads, candidates.size()),
                  [&](std::size_t begin, std::size_t end, unsigned) {
                    for (std::size_t i = begin; i < end; ++i) {
                      refined[i] = refine_factored(pencil, candidates[i]);
                    }
                  });

  RankOneLocus locus;
  locus.candidates = candidates.size();
  std::vector<std::pair<Point, Eigen::VectorXd>> good;
  for (auto& r : refined) {
    if (!r.ok || !in_box(r.x, box) || !is_rank_one_point(pencil, r.x, opts.tol)) {
      ++locus.newton_failures;
      continue;
    }
    good.emplace_back(std::move(r.x), std::move(r.w));
  }
  std::sort(good.begin(), good.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  for (auto& [x, w] : good) {
    const bool dup = std::any_of(locus.points.begin(), locus.points.end(), [&](const Point& p) {
      return distance(p, x) <= opts.dedup_radius;
    });
    if (dup) continue;
    locus.points.push_back(std::move(x));
    locus.factors.push_back(std::move(w));
  }
  return locus;
}

RankOneLocus enumerate_rank_one(const SpectrahedronSpec& spec, const Box& box,
                                const EnumerateOptions& opts) {
  if (!spec.pencil) throw std::invalid_argument("enumerate_rank_one: spec has no pencil form");
  return enumerate_rank_one(*spec.pencil, box, opts);
}

std::vector<Point> boundary_ray_points(const MatrixPencil& pencil,
                                       std::span<const double> interior, int count) {
  pencil.validate();
  const int d = pencil.dimension();
  if (static_cast<int>(interior.size()) != d) {
    throw std::invalid_argument("boundary_ray_points: dimension mismatch");
  }
  const Eigen::LLT<Eigen::MatrixXd> llt(pencil.at(interior).dense());
  if (llt.info() != Eigen::Success) {
    throw std::invalid_argument("boundary_ray_points: pencil is not positive definite there");
  }
  const Eigen::MatrixXd lower = llt.matrixL();

  std::vector<Point> dirs;
  if (d == 1) {
    dirs = {{1.0}, {-1.0}};
  } else if (d == 2) {
    for (int k = 0; k < count; ++k) {
      const double t = 2.0 * std::numbers::pi * k / count;
      dirs.push_back({std::cos(t), std::sin(t)});
    }
  } else if (d == 3) {
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (int k = 0; k < count; ++k) {
      const double z = 1.0 - 2.0 * (k + 0.5) / count;
      const double r = std::sqrt(1.0 - z * z);
      dirs.push_back({r * std::cos(golden * k), r * std::sin(golden * k), z});
    }
  } else {
    throw std::invalid_argument("boundary_ray_points: need 1 to 3 parameters");
  }

  std::vector<Point> out;
  for (const auto& u : dirs) {
    SymMatrix dir(pencil.size());
    for (int i = 0; i < d; ++i) dir += u[i] * pencil.params[i];
    // M(c + s u) = L (I + s K) L^T with K = L^{-1} D L^{-T}.
    const Eigen::MatrixXd half = lower.triangularView<Eigen::Lower>().solve(dir.dense());
    const Eigen::MatrixXd k =
        lower.triangularView<Eigen::Lower>().solve(half.transpose()).transpose();
    const Eigen::MatrixXd ksym = 0.5 * (k + k.transpose());
    const double mu_min = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(
                              ksym, Eigen::EigenvaluesOnly).eigenvalues()(0);
    if (mu_min >= -1e-14) continue;
    const double s = -1.0 / mu_min;
    Point p(d);
    for (int i = 0; i < d; ++i) p[i] = interior[i] + s * u[i];
    out.push_back(std::move(p));
  }
  return out;
}

RankOneLocus sample_rank_one_boundary(const MatrixPencil& pencil,
                                      std::span<const double> interior, int count, double tol) {
  RankOneLocus locus;
  for (auto& p : boundary_ray_points(pencil, interior, count)) {
    ++locus.candidates;
    auto w = rank_one_factor(pencil.at(p), tol);
    if (!w) continue;
    locus.points.push_back(std::move(p));
    locus.factors.push_back(std::move(*w));
  }
  return locus;
}

QcqpInstance circle_instance() {
  QcqpInstance inst;
  inst.constraints = make_system({"x", "y"}, {{"x^2 + y^2 - 1", Relation::kEq}});
  inst.objective = from_rows({{1, 0}, {0, -1}});
  inst.box = {{-1.5, 1.5}, {-1.5, 1.5}};
  return inst;
}

QcqpInstance four_point_instance() {
  QcqpInstance inst;
  inst.constraints = make_system({"x", "y", "z", "w1", "w2", "w3"},
                                 {{"x + 1 - w1^2", Relation::kEq},
                                  {"1 - y - w2^2", Relation::kEq},
                                  {"z + 1 - w3^2", Relation::kEq},
                                  {"z - w1*w2", Relation::kEq},
                                  {"y - w1*w3", Relation::kEq},
                                  {"x - w2*w3", Relation::kEq}});
  inst.objective = SymMatrix(6);
  for (int i = 0; i < 3; ++i) inst.objective.set(i, i, 1.0);
  inst.box.assign(6, {-2.0, 2.0});
  return inst;
}

std::vector<Point> sample_constraint_set(const PolySystem& sys, const Box& box, int n_samples,
                                         std::mt19937_64& rng) {
  sys.validate();
  const int n = sys.nvars;
  if (static_cast<int>(box.size()) != n) {
    throw std::invalid_argument("sample_constraint_set: box dimension mismatch");
  }
  std::vector<FlatPoly> eqs;
  std::vector<std::vector<FlatPoly>> grads;
  for (const auto& c : sys.constraints) {
    if (c.rel != Relation::kEq) continue;
    eqs.emplace_back(c.poly);
    std::vector<FlatPoly> g;
    for (int i = 0; i < n; ++i) g.emplace_back(c.poly.derivative(i));
    grads.push_back(std::move(g));
  }
  const int m = static_cast<int>(eqs.size());

  std::vector<std::uniform_real_distribution<double>> coord;
  for (const auto& [lo, hi] : box) coord.emplace_back(lo, hi);
  std::vector<Point> out;
  Eigen::VectorXd f(m);
  Eigen::MatrixXd jac(m, n);
  for (int s = 0; s < n_samples; ++s) {
    Point x(n);
    for (int i = 0; i < n; ++i) x[i] = coord[i](rng);
    if (m > 0) {
      for (int it = 0; it < 50; ++it) {
        for (int j = 0; j < m; ++j) {
          f(j) = eqs[j].eval(x.data());
          for (int i = 0; i < n; ++i) jac(j, i) = grads[j][i].eval(x.data());
        }
        if (f.lpNorm<Eigen::Infinity>() <= 1e-14) break;
        const Eigen::VectorXd step = jac.completeOrthogonalDecomposition().solve(-f);
        if (!step.allFinite()) break;
        for (int i = 0; i < n; ++i) x[i] += step(i);
      }
    }
    if (in_box(x, box) && sys.contains(x, 1e-12)) out.push_back(std::move(x));
  }
  return out;
}

QcqpReport qcqp_check(const QcqpInstance& inst, int n_samples, std::mt19937_64& rng) {
  if (inst.objective.size() != inst.constraints.nvars) {
    throw std::invalid_argument("qcqp_check: objective size differs from variable count");
  }
  if (inst.constraints.max_degree() > 2) {
    throw std::invalid_argument("qcqp_check: constraints must have degree <= 2");
  }
  QcqpReport rep;
  rep.samples = static_cast<std::size_t>(std::max(0, n_samples));
  const std::vector<Point> pts = sample_constraint_set(inst.constraints, inst.box, n_samples, rng);
  rep.feasible = pts.size();
  if (pts.empty()) {
    rep.brute_min = rep.hull_min = std::numeric_limits<double>::infinity();
    rep.gap = std::numeric_limits<double>::quiet_NaN();
    return rep;
  }
  rep.brute_min = std::numeric_limits<double>::infinity();
  rep.hull_min = std::numeric_limits<double>::infinity();
  for (const auto& x : pts) {
    const double direct = inst.objective.quadratic_form(x);
    if (direct < rep.brute_min) {
      rep.brute_min = direct;
      rep.argmin = x;
    }
    // A linear functional attains its minimum over a hull at a generator.
    rep.hull_min = std::min(rep.hull_min, frobenius(inst.objective, SymMatrix::outer(x)));
  }
  rep.gap = rep.brute_min - rep.hull_min;
  return rep;
}

std::vector<TraceSliceTerm> decompose_trace_one(const SymMatrix& x) {
  const EigenDecomposition e = eigh(x);
  const double scale = 1.0 + x.frobenius_norm();
  std::vector<TraceSliceTerm> terms;
  for (int i = 0; i < x.size(); ++i) {
    double lambda = e.values(i);
    if (lambda < -1e-10 * scale) {
      throw std::invalid_argument("decompose_trace_one: matrix is not PSD");
    }
    lambda = std::max(0.0, lambda);
    const Eigen::VectorXd u = e.vectors.col(i);
    terms.push_back({lambda, SymMatrix::outer(u)});
  }
  return terms;
}

TraceSliceReport trace_slice_pseudo_check(int n, int n_samples, std::mt19937_64& rng) {
  if (n < 2 || n > 6) throw std::invalid_argument("trace_slice_pseudo_check: need 2 <= n <= 6");
  TraceSliceReport rep;
  rep.n = n;
  rep.min_weight = std::numeric_limits<double>::infinity();
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_int_distribution<int> rank_dist(1, n);
  for (int s = 0; s < n_samples; ++s) {
    const int rank = rank_dist(rng);
    Eigen::MatrixXd g(n, rank);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < rank; ++j) g(i, j) = normal(rng);
    }
    Eigen::MatrixXd dense = g * g.transpose();
    dense /= dense.trace();
    const SymMatrix x = SymMatrix::from_dense(dense, 1e-12);

    SymMatrix rebuilt(n);
    double weight_sum = 0.0;
    for (const auto& t : decompose_trace_one(x)) {
      rebuilt += t.weight * t.projector;
      weight_sum += t.weight;
      rep.min_weight = std::min(rep.min_weight, t.weight);
      rep.max_term_trace_error =
          std::max(rep.max_term_trace_error, std::abs(t.projector.trace() - 1.0));
      rep.max_term_rank_two = std::max(rep.max_term_rank_two, eigh(t.projector).values(n - 2));
    }
    rep.max_reconstruction_error =
        std::max(rep.max_reconstruction_error, (x - rebuilt).frobenius_norm());
    rep.max_weight_sum_error = std::max(rep.max_weight_sum_error, std::abs(weight_sum - 1.0));
    ++rep.samples;
  }
  if (rep.samples == 0) rep.min_weight = 0.0;
  return rep;
}

BoundaryRankReport boundary_rank_check(const MatrixPencil& pencil,
                                       std::span<const RankCombination> combos) {
  pencil.validate();
  const int n = pencil.size();
  BoundaryRankReport rep;
  for (const auto& combo : combos) {
    if (combo.points.empty() || static_cast<int>(combo.points.size()) > n - 1) {
      throw std::invalid_argument("boundary_rank_check: need 1 to N-1 rank-one elements");
    }
    const SimplexWeights w(combo.weights);
    if (w.size() != combo.points.size()) {
      throw std::invalid_argument("boundary_rank_check: weight count mismatch");
    }
    SymMatrix m(n);
    for (std::size_t i = 0; i < combo.points.size(); ++i) {
      m += w.values()[i] * pencil.at(combo.points[i]);
    }
    BoundaryRankEntry entry;
    entry.parameter = caratheodory_combine(combo.points, w);
    const Eigen::VectorXd ev = eigh(m).values;
    entry.min_eigenvalue = ev(0);
    entry.max_eigenvalue = ev(n - 1);
    const double cutoff = 1e-9 * m.frobenius_norm();
    entry.psd = ev(0) >= -cutoff;
    entry.singular = ev(0) <= cutoff;
    if (!entry.psd || !entry.singular) ++rep.violations;
    rep.entries.push_back(std::move(entry));
  }
  return rep;
}

}  // namespace pseudospec
