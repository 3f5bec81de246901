#include "pseudospec/encode.h"

#include <algorithm>
#include <cmath>

namespace pseudospec {

VariableLayout VariableLayout::strict(int n, int n_project, int k) {
  if (n < 0 || k < 0 || n_project < 0 || n_project > n) {
    throw std::invalid_argument("VariableLayout::strict: bad dimensions");
  }
  VariableLayout l;
  l.kind = Kind::kStrict;
  l.n = n;
  l.n_project = n_project;
  l.k = k;
  l.N = 3 * k + n + 1;
  return l;
}

VariableLayout VariableLayout::compact(int n, int n_project, int m) {
  if (n < 0 || m < 0 || n_project < 0 || n_project > n) {
    throw std::invalid_argument("VariableLayout::compact: bad dimensions");
  }
  VariableLayout l;
  l.kind = Kind::kCompact;
  l.n = n;
  l.n_project = n_project;
  l.m = m;
  l.N = n + m + 2;
  return l;
}

std::vector<std::string> VariableLayout::slot_names(std::span<const std::string> x_names) const {
  if (static_cast<int>(x_names.size()) != n) {
    throw std::invalid_argument("VariableLayout::slot_names: wrong name count");
  }
  std::vector<std::string> names{"x0"};
  names.insert(names.end(), x_names.begin(), x_names.end());
  if (kind == Kind::kStrict) {
    for (const char* prefix : {"y", "z", "r"}) {
      for (int a = 1; a <= k; ++a) names.push_back(prefix + std::to_string(a));
    }
  } else {
    for (int a = 1; a <= m; ++a) names.push_back("z" + std::to_string(a));
    names.push_back("w");
  }
  return names;
}

std::string_view to_string(VariableLayout::Kind kind) {
  return kind == VariableLayout::Kind::kStrict ? "strict" : "compact";
}

SymMatrix pair_matrix(const VariableLayout& layout, int i, int j) {
  if (i < 0 || j < 0 || i > layout.n || j > layout.n) {
    throw std::out_of_range("pair_matrix: label out of range");
  }
  SymMatrix m(layout.N);
  if (i == j) {
    m.set(layout.label(i), layout.label(i), 1.0);
  } else {
    m.set(layout.label(i), layout.label(j), 0.5);
  }
  return m;
}

SymMatrix y_matrix(const VariableLayout& layout, int a) {
  SymMatrix m(layout.N);
  m.set(layout.x0(), layout.y(a), 0.5);
  return m;
}

SymMatrix g_matrix(const VariableLayout& layout, int a) {
  SymMatrix m(layout.N);
  m.set(layout.r(a), layout.r(a), 1.0);
  return m;
}

SymMatrix yz_matrix(const VariableLayout& layout, int a) {
  SymMatrix m(layout.N);
  m.set(layout.y(a), layout.z(a), 0.5);
  return m;
}

SymMatrix quadratic_matrix(const VariableLayout& layout, const QuadCoeffs& coeffs) {
  if (coeffs.n != layout.n) throw std::invalid_argument("quadratic_matrix: x block mismatch");
  SymMatrix m(layout.N);
  for (const auto& [key, c] : coeffs.entries) m += c * pair_matrix(layout, key.first, key.second);
  return m;
}

std::string_view to_string(EncodingConstraint::Kind kind) {
  switch (kind) {
    case EncodingConstraint::Kind::kF: return "F";
    case EncodingConstraint::Kind::kQ: return "Q";
    case EncodingConstraint::Kind::kG: return "G";
    case EncodingConstraint::Kind::kA0: return "A0";
    case EncodingConstraint::Kind::kYZ: return "YZ";
    case EncodingConstraint::Kind::kTrace: return "trace";
  }
  return "?";
}

EncodingConstraint::Kind parse_constraint_kind(std::string_view text) {
  using Kind = EncodingConstraint::Kind;
  for (Kind k : {Kind::kF, Kind::kQ, Kind::kG, Kind::kA0, Kind::kYZ, Kind::kTrace}) {
    if (to_string(k) == text) return k;
  }
  throw std::invalid_argument("unknown constraint kind '" + std::string(text) + "'");
}

void PseudoSpecEncoding::validate() const {
  for (const auto& c : constraints) {
    if (c.matrix.size() != layout.N) {
      throw std::invalid_argument("PseudoSpecEncoding: constraint matrix size mismatch");
    }
  }
  if (static_cast<int>(projection.size()) != layout.n_project) {
    throw std::invalid_argument("PseudoSpecEncoding: projection count mismatch");
  }
  for (const auto& p : projection) {
    if (p.size() != layout.N) {
      throw std::invalid_argument("PseudoSpecEncoding: projection matrix size mismatch");
    }
  }
}

std::vector<double> PseudoSpecEncoding::residuals(const SymMatrix& x) const {
  if (x.size() != layout.N) throw std::invalid_argument("residuals: size mismatch");
  std::vector<double> out;
  out.reserve(constraints.size());
  for (const auto& c : constraints) out.push_back(frobenius(c.matrix, x) - c.rhs);
  return out;
}

SpectrahedronSpec PseudoSpecEncoding::spectrahedron() const {
  SpectrahedronSpec spec;
  spec.n = layout.N;
  for (const auto& c : constraints) spec.constraints.push_back({c.matrix, c.rhs});
  spec.trace_bound = trace_bound;
  return spec;
}

int PseudoSpecEncoding::count_rhs(double rhs) const {
  return static_cast<int>(std::count_if(constraints.begin(), constraints.end(),
                                        [&](const auto& c) { return c.rhs == rhs; }));
}

std::vector<double> NormalizedSystem::lift(std::span<const double> p) const {
  std::vector<double> out = lift_point(p, table);
  const std::vector<double> base = out;
  for (std::size_t j = 0; j < slack_polys.size(); ++j) {
    const double g = slack_polys[j].eval(base);
    if (g < -1e-12 * (1.0 + slack_polys[j].abs_eval(base))) {
      throw LiftError("slack polynomial is negative", static_cast<int>(j) + 1);
    }
    out.push_back(std::sqrt(std::max(0.0, g)));
  }
  return out;
}

NormalizedSystem normalize_relations(const QuadSystem& q) {
  const int base_vars = q.base.nvars;
  int slacks = 0;
  for (const auto& c : q.base.constraints) {
    if (c.rel == Relation::kGe || c.rel == Relation::kLe) ++slacks;
  }
  NormalizedSystem out;
  out.table = q.table;
  out.n_project = q.n_original;
  out.system.nvars = base_vars + slacks;
  out.system.var_names =
      q.base.var_names.empty() ? default_var_names(base_vars) : q.base.var_names;
  for (int j = 1; j <= slacks; ++j) out.system.var_names.push_back("s" + std::to_string(j));

  int next_slack = base_vars;
  for (const auto& c : q.base.constraints) {
    const Polynomial wide = c.poly.extended(out.system.nvars);
    switch (c.rel) {
      case Relation::kEq:
      case Relation::kGt:
        out.system.constraints.push_back({wide, c.rel});
        break;
      case Relation::kLt:
        out.system.constraints.push_back({-wide, Relation::kGt});
        break;
      case Relation::kGe:
      case Relation::kLe: {
        const Polynomial g = c.rel == Relation::kGe ? c.poly : -c.poly;
        Exponents sq(out.system.nvars, 0);
        sq[next_slack++] = 2;
        Polynomial eq = g.extended(out.system.nvars);
        eq.add_term(sq, -1.0);
        out.system.constraints.push_back({std::move(eq), Relation::kEq});
        out.slack_polys.push_back(g);
        break;
      }
    }
  }
  return out;
}

StrictSystem strict_to_equations(const PolySystem& sys, int n_project) {
  sys.validate();
  StrictSystem out;
  const int n = sys.nvars;
  for (const auto& c : sys.constraints) {
    if (c.poly.total_degree() > 2) {
      throw std::invalid_argument("strict_to_equations: constraint of degree > 2");
    }
    if (c.rel == Relation::kGt) {
      out.inequalities.push_back(c.poly);
    } else if (c.rel == Relation::kEq) {
      out.equations.push_back(c.poly);
    } else {
      throw std::invalid_argument("strict_to_equations: unsupported relation '" +
                                  std::string(to_string(c.rel)) + "' after normalization");
    }
  }
  const int k = static_cast<int>(std::max(out.inequalities.size(), out.equations.size()));
  out.inequalities.resize(k, Polynomial::constant(n, 1.0));
  out.equations.resize(k, Polynomial(n));
  out.layout = VariableLayout::strict(n, n_project, k);
  out.x_names = sys.var_names.empty() ? default_var_names(n) : sys.var_names;

  // Slot variables without x_0: x (n), y (k), z (k), r (k).
  const int nv = n + 3 * k;
  PolySystem& eqs = out.equation_system;
  eqs.nvars = nv;
  const std::vector<std::string> slots = out.layout.slot_names(out.x_names);
  eqs.var_names.assign(slots.begin() + 1, slots.end());
  auto var = [&](int slot_index) { return Polynomial::variable(nv, slot_index - 1); };
  for (int a = 1; a <= k; ++a) {
    const Polynomial y = var(out.layout.y(a));
    const Polynomial z = var(out.layout.z(a));
    const Polynomial r = var(out.layout.r(a));
    eqs.constraints.push_back({out.equations[a - 1].extended(nv), Relation::kEq});
    eqs.constraints.push_back({out.inequalities[a - 1].extended(nv) - y, Relation::kEq});
    eqs.constraints.push_back({y - r * r, Relation::kEq});
    eqs.constraints.push_back({y * z - Polynomial::constant(nv, 1.0), Relation::kEq});
  }
  return out;
}

StrictSystem strict_to_equations(const NormalizedSystem& sys) {
  return strict_to_equations(sys.system, sys.n_project);
}

PseudoSpecEncoding build_encoding(const StrictSystem& sys) {
  const VariableLayout& layout = sys.layout;
  if (static_cast<int>(sys.inequalities.size()) != layout.k ||
      static_cast<int>(sys.equations.size()) != layout.k) {
    throw std::invalid_argument("build_encoding: constraint count differs from layout k");
  }
  using Kind = EncodingConstraint::Kind;
  PseudoSpecEncoding enc;
  enc.layout = layout;
  for (int a = 1; a <= layout.k; ++a) {
    const Polynomial& f = sys.inequalities[a - 1];
    const Polynomial& q = sys.equations[a - 1];
    if (f.nvars() != layout.n || q.nvars() != layout.n) {
      throw std::invalid_argument("build_encoding: polynomial/layout variable mismatch");
    }
    const SymMatrix ya = y_matrix(layout, a);
    enc.constraints.push_back({Kind::kF, a, quadratic_matrix(layout, quad_coeffs(f)) - ya, 0.0});
    enc.constraints.push_back({Kind::kQ, a, quadratic_matrix(layout, quad_coeffs(q)), 0.0});
    enc.constraints.push_back({Kind::kG, a, ya - g_matrix(layout, a), 0.0});
  }
  enc.constraints.push_back({Kind::kA0, 0, pair_matrix(layout, 0, 0), 1.0});
  for (int a = 1; a <= layout.k; ++a) {
    enc.constraints.push_back({Kind::kYZ, a, yz_matrix(layout, a), 1.0});
  }
  for (int b = 1; b <= layout.n_project; ++b) enc.projection.push_back(pair_matrix(layout, 0, b));
  return enc;
}

LiftError::LiftError(const std::string& what, int index)
    : std::domain_error(what + (index > 0 ? " (constraint " + std::to_string(index) + ")" : "")),
      index_(index) {}

Lift lift(std::span<const double> x_block, const StrictSystem& sys) {
  const VariableLayout& layout = sys.layout;
  if (static_cast<int>(x_block.size()) != layout.n) {
    throw std::invalid_argument("lift: dimension mismatch");
  }
  Eigen::VectorXd v = Eigen::VectorXd::Zero(layout.N);
  v(layout.x0()) = 1.0;
  for (int b = 1; b <= layout.n; ++b) v(layout.label(b)) = x_block[b - 1];
  for (int a = 1; a <= layout.k; ++a) {
    const double y = sys.inequalities[a - 1].eval(x_block);
    if (!(y > 0.0)) throw LiftError("lift: inequality not strictly satisfied", a);
    v(layout.y(a)) = y;
    v(layout.z(a)) = 1.0 / y;
    v(layout.r(a)) = std::sqrt(y);
  }
  return {v, SymMatrix::outer(v)};
}

std::vector<double> project(const SymMatrix& x, const PseudoSpecEncoding& enc) {
  if (x.size() != enc.layout.N) throw std::invalid_argument("project: size mismatch");
  std::vector<double> out;
  out.reserve(enc.projection.size());
  for (const auto& p : enc.projection) out.push_back(frobenius(p, x));
  return out;
}

MembershipReport check_rank_one_member(const SymMatrix& x, const PseudoSpecEncoding& enc,
                                       double tol) {
  if (x.size() != enc.layout.N) {
    throw std::invalid_argument("check_rank_one_member: size mismatch");
  }
  MembershipReport rep;
  const double scale = 1.0 + x.frobenius_norm();
  const EigenDecomposition e = eigh(x);
  const int n = x.size();
  rep.min_eigenvalue = n > 0 ? e.values(0) : 0.0;
  rep.max_eigenvalue = n > 0 ? e.values(n - 1) : 0.0;
  rep.second_eigenvalue = n > 1 ? e.values(n - 2) : 0.0;
  rep.psd = rep.min_eigenvalue >= -tol * scale;
  rep.rank_one = rep.max_eigenvalue > 0.0 && rep.second_eigenvalue <= tol * rep.max_eigenvalue;
  const std::vector<double> res = enc.residuals(x);
  for (std::size_t i = 0; i < res.size(); ++i) {
    if (std::abs(res[i]) > rep.max_residual) {
      rep.max_residual = std::abs(res[i]);
      rep.worst_constraint = static_cast<int>(i);
    }
  }
  rep.constraints_ok = rep.max_residual <= tol * scale;
  return rep;
}

std::vector<Eigen::VectorXd> sample_rank_one_members(const PseudoSpecEncoding& enc,
                                                     std::mt19937_64& rng, int count,
                                                     int max_attempts) {
  const int n = enc.layout.N;
  const int m = static_cast<int>(enc.constraints.size());
  std::vector<Eigen::MatrixXd> mats;
  Eigen::VectorXd rhs(m);
  for (int i = 0; i < m; ++i) {
    mats.push_back(enc.constraints[i].matrix.dense());
    rhs(i) = enc.constraints[i].rhs;
  }

  std::normal_distribution<double> normal(0.0, 1.0);
  std::bernoulli_distribution coin(0.5);
  std::vector<Eigen::VectorXd> out;
  Eigen::VectorXd r(m);
  Eigen::MatrixXd jac(m, n);
  for (int attempt = 0; attempt < max_attempts && static_cast<int>(out.size()) < count;
       ++attempt) {
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v(i) = normal(rng);
    v(0) = coin(rng) ? 1.0 : -1.0;

    bool converged = false;
    for (int it = 0; it < 100; ++it) {
      for (int i = 0; i < m; ++i) {
        const Eigen::VectorXd cv = mats[i] * v;
        r(i) = v.dot(cv) - rhs(i);
        jac.row(i) = 2.0 * cv.transpose();
      }
      if (r.lpNorm<Eigen::Infinity>() <= 1e-12 * (1.0 + v.squaredNorm())) {
        converged = v.squaredNorm() <= 1e4;
        break;
      }
      const Eigen::VectorXd step = jac.completeOrthogonalDecomposition().solve(-r);
      if (!step.allFinite()) break;
      v += step;
      if (v.norm() > 1e8) break;
    }
    if (converged) out.push_back(v);
  }
  return out;
}

Lift StrictEncoding::lift_original(std::span<const double> p) const {
  const std::vector<double> x = normalized.lift(p);
  return lift(x, strict);
}

StrictEncoding encode_strict(const QuadSystem& q) {
  StrictEncoding out;
  out.normalized = normalize_relations(q);
  out.strict = strict_to_equations(out.normalized);
  out.encoding = build_encoding(out.strict);
  return out;
}

namespace {

// Squared norm of the lifted vector without the slack w.
double compact_norm_sq(std::span<const double> x_block, const QuadSystem& q,
                       std::span<const int> z_sources) {
  double s = 1.0;
  for (double x : x_block) s += x * x;
  for (int idx : z_sources) s += std::max(0.0, q.base.constraints[idx].poly.eval(x_block));
  return s;
}

}  // namespace

Lift CompactEncoding::lift_original(std::span<const double> p) const {
  const VariableLayout& layout = encoding.layout;
  const std::vector<double> x = lift_point(p, source.table);
  Eigen::VectorXd v = Eigen::VectorXd::Zero(layout.N);
  v(layout.x0()) = 1.0;
  for (int b = 1; b <= layout.n; ++b) v(layout.label(b)) = x[b - 1];
  for (int a = 1; a <= layout.m; ++a) {
    const Polynomial& g = source.base.constraints[z_sources[a - 1]].poly;
    const double val = g.eval(x);
    if (val < -1e-12 * (1.0 + g.abs_eval(x))) {
      throw LiftError("lift: inequality violated", z_sources[a - 1] + 1);
    }
    v(layout.z(a)) = std::sqrt(std::max(0.0, val));
  }
  const double rest = v.squaredNorm();
  const double b = *encoding.trace_bound;
  if (rest > b) throw LiftError("lift: squared norm exceeds trace bound B", 0);
  v(layout.w()) = std::sqrt(b - rest);
  return {v, SymMatrix::outer(v)};
}

CompactEncoding encode_compact(const QuadSystem& q, const CompactOptions& options) {
  using Kind = EncodingConstraint::Kind;
  CompactEncoding out;
  out.source = q;
  for (std::size_t i = 0; i < q.base.constraints.size(); ++i) {
    const Relation rel = q.base.constraints[i].rel;
    if (rel == Relation::kGe) {
      out.z_sources.push_back(static_cast<int>(i));
    } else if (rel != Relation::kEq) {
      throw std::invalid_argument("encode_compact: relation '" + std::string(to_string(rel)) +
                                  "' is not supported (use >= or =)");
    }
  }
  const VariableLayout layout = VariableLayout::compact(
      q.base.nvars, q.n_original, static_cast<int>(out.z_sources.size()));

  if (!options.box.empty()) {
    if (static_cast<int>(options.box.size()) != q.n_original) {
      throw std::invalid_argument("encode_compact: box dimension mismatch");
    }
    std::mt19937_64 rng(options.seed);
    std::vector<std::uniform_real_distribution<double>> coord;
    for (const auto& [lo, hi] : options.box) coord.emplace_back(lo, hi);
    std::vector<double> p(q.n_original);
    for (int s = 0; s < options.samples; ++s) {
      for (int i = 0; i < q.n_original; ++i) p[i] = coord[i](rng);
      const std::vector<double> x = lift_point(p, q.table);
      if (!q.base.contains(x, 0.0)) continue;
      ++out.feasible_samples;
      out.max_sampled_norm = std::max(out.max_sampled_norm, compact_norm_sq(x, q, out.z_sources));
    }
  }

  double bound = 0.0;
  if (options.trace_bound) {
    bound = *options.trace_bound;
    if (!(bound > 1.0)) throw std::invalid_argument("encode_compact: B must exceed 1");
    if (out.max_sampled_norm > bound) {
      throw std::invalid_argument("encode_compact: B is smaller than a sampled lift norm " +
                                  std::to_string(out.max_sampled_norm));
    }
  } else {
    if (options.box.empty()) {
      throw std::invalid_argument("encode_compact: need a trace bound or a sampling box");
    }
    if (out.feasible_samples == 0) {
      throw std::runtime_error("encode_compact: no feasible samples to select B; pass B");
    }
    bound = 1.5 * (1.0 + out.max_sampled_norm);
  }

  PseudoSpecEncoding& enc = out.encoding;
  enc.layout = layout;
  enc.trace_bound = bound;
  int z_index = 0;
  int eq_index = 0;
  for (const auto& c : q.base.constraints) {
    SymMatrix mat = quadratic_matrix(layout, quad_coeffs(c.poly));
    if (c.rel == Relation::kGe) {
      ++z_index;
      mat.add(layout.z(z_index), layout.z(z_index), -1.0);
      enc.constraints.push_back({Kind::kF, z_index, std::move(mat), 0.0});
    } else {
      enc.constraints.push_back({Kind::kQ, ++eq_index, std::move(mat), 0.0});
    }
  }
  enc.constraints.push_back({Kind::kA0, 0, pair_matrix(layout, 0, 0), 1.0});
  enc.constraints.push_back({Kind::kTrace, 0, SymMatrix::identity(layout.N), bound});
  for (int b = 1; b <= layout.n_project; ++b) enc.projection.push_back(pair_matrix(layout, 0, b));
  return out;
}

CompactEncoding encode_compact(const PolySystem& sys, const CompactOptions& options) {
  return encode_compact(quadratize(sys), options);
}

}  // namespace pseudospec
