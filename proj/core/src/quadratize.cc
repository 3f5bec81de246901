#include "pseudospec/quadratize.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>

namespace pseudospec {

namespace {

using MonomialSet = std::set<Exponents, GradedLexLess>;

int lowest_variable(const Exponents& e) {
  for (std::size_t i = 0; i < e.size(); ++i) {
    if (e[i] > 0) return static_cast<int>(i);
  }
  return -1;
}

Exponents divide(Exponents e, int b) {
  --e[b];
  return e;
}

void add_closure(const Exponents& m, MonomialSet& out) {
  if (total_degree(m) < 2 || out.contains(m)) return;
  out.insert(m);
  for (std::size_t b = 0; b < m.size(); ++b) {
    if (m[b] > 0) add_closure(divide(m, static_cast<int>(b)), out);
  }
}

Exponents product(int ext, int i, int j) {
  Exponents e(ext, 0);
  ++e[i];
  ++e[j];
  return e;
}

std::vector<std::string> extended_names(const PolySystem& sys, int m) {
  std::vector<std::string> names =
      sys.var_names.empty() ? default_var_names(sys.nvars) : sys.var_names;
  std::string prefix = "u";
  // Keep auxiliary names distinct from any user-supplied name.
  auto clashes = [&](const std::string& p) {
    for (int a = 1; a <= m; ++a) {
      if (std::find(names.begin(), names.end(), p + std::to_string(a)) != names.end()) {
        return true;
      }
    }
    return false;
  };
  while (clashes(prefix)) prefix = "_" + prefix;
  for (int a = 1; a <= m; ++a) names.push_back(prefix + std::to_string(a));
  return names;
}

}  // namespace

std::optional<int> SubstitutionTable::variable_for(const Exponents& e) const {
  const int d = total_degree(e);
  if (d == 1) return lowest_variable(e);
  if (d < 2) return std::nullopt;
  for (int a = 0; a < aux_count(); ++a) {
    if (defs[a] == e) return n_original + a;
  }
  return std::nullopt;
}

std::span<const Constraint> QuadSystem::rewritten() const {
  return std::span<const Constraint>(base.constraints).first(n_rewritten);
}

std::span<const Constraint> QuadSystem::e_equations() const {
  return std::span<const Constraint>(base.constraints).subspan(n_rewritten);
}

QuadSystem assemble_quad_system(PolySystem rewritten, SubstitutionTable table) {
  rewritten.validate();
  if (rewritten.nvars != table.extended_nvars()) {
    throw std::invalid_argument("assemble_quad_system: variable count mismatch");
  }
  QuadSystem q;
  q.n_original = table.n_original;
  q.n_rewritten = static_cast<int>(rewritten.constraints.size());
  q.base = std::move(rewritten);
  for (const auto& set : table.e_sets) {
    for (const auto& entry : set) q.base.constraints.push_back({entry.poly, Relation::kEq});
  }
  q.table = std::move(table);
  return q;
}

SubstitutionTable make_substitution_table(int n_original, std::vector<Exponents> defs) {
  std::sort(defs.begin(), defs.end(), GradedLexLess{});
  const int m = static_cast<int>(defs.size());
  const int ext = n_original + m;
  std::map<Exponents, int, GradedLexLess> aux_index;
  for (int a = 0; a < m; ++a) {
    if (static_cast<int>(defs[a].size()) != n_original || total_degree(defs[a]) < 2 ||
        std::any_of(defs[a].begin(), defs[a].end(), [](int e) { return e < 0; })) {
      throw std::invalid_argument("make_substitution_table: bad auxiliary monomial");
    }
    if (!aux_index.emplace(defs[a], n_original + a).second) {
      throw std::invalid_argument("make_substitution_table: duplicate auxiliary monomial");
    }
  }
  auto var_index = [&](const Exponents& e) {
    if (total_degree(e) == 1) return lowest_variable(e);
    const auto it = aux_index.find(e);
    if (it == aux_index.end()) {
      throw std::invalid_argument("make_substitution_table: monomials not closed under division");
    }
    return it->second;
  };

  SubstitutionTable table;
  table.n_original = n_original;
  table.defs = std::move(defs);
  for (int a = 0; a < m; ++a) {
    const Exponents& mono = table.defs[a];
    std::vector<ESetEntry> set;
    for (int b = 0; b < n_original; ++b) {
      if (mono[b] == 0) continue;
      const int v = var_index(divide(mono, b));
      Polynomial poly = Polynomial::variable(ext, n_original + a);
      poly.add_term(product(ext, b, v), -1.0);
      set.push_back({b, v, std::move(poly)});
    }
    table.e_sets.push_back(std::move(set));
  }
  return table;
}

QuadSystem quadratize(const PolySystem& sys) {
  sys.validate();
  const int n = sys.nvars;

  MonomialSet needed;
  for (const auto& c : sys.constraints) {
    for (const auto& [e, coeff] : c.poly.terms()) {
      if (total_degree(e) >= 3) add_closure(divide(e, lowest_variable(e)), needed);
    }
  }
  SubstitutionTable table =
      make_substitution_table(n, std::vector<Exponents>(needed.begin(), needed.end()));
  const int m = table.aux_count();
  const int ext = n + m;

  PolySystem rewritten;
  rewritten.nvars = ext;
  rewritten.var_names = extended_names(sys, m);
  for (const auto& c : sys.constraints) {
    Polynomial p(ext);
    for (const auto& [e, coeff] : c.poly.terms()) {
      if (total_degree(e) <= 2) {
        Exponents wide = e;
        wide.resize(ext, 0);
        p.add_term(wide, coeff);
      } else {
        const int b = lowest_variable(e);
        p.add_term(product(ext, b, *table.variable_for(divide(e, b))), coeff);
      }
    }
    rewritten.constraints.push_back({std::move(p), c.rel});
  }
  return assemble_quad_system(std::move(rewritten), std::move(table));
}

PolySystem recover_original(const QuadSystem& q) {
  const int n = q.n_original;
  PolySystem out;
  out.nvars = n;
  out.var_names.assign(q.base.var_names.begin(), q.base.var_names.begin() + n);
  for (const auto& c : q.rewritten()) {
    Polynomial p(n);
    for (const auto& [e, coeff] : c.poly.terms()) {
      Exponents flat(e.begin(), e.begin() + n);
      for (int a = 0; a < q.table.aux_count(); ++a) {
        for (int i = 0; i < n; ++i) flat[i] += e[n + a] * q.table.defs[a][i];
      }
      p.add_term(flat, coeff);
    }
    out.constraints.push_back({std::move(p), c.rel});
  }
  return out;
}

std::vector<double> lift_point(std::span<const double> p, const SubstitutionTable& table) {
  if (static_cast<int>(p.size()) != table.n_original) {
    throw std::invalid_argument("lift_point: dimension mismatch");
  }
  std::vector<double> out(p.begin(), p.end());
  out.reserve(table.extended_nvars());
  for (const auto& mono : table.defs) {
    out.push_back(Polynomial::monomial(mono).eval(p));
  }
  return out;
}

EquivalenceReport verify_equivalence(const PolySystem& sys, const QuadSystem& q,
                                     std::span<const std::vector<double>> samples,
                                     std::span<const std::vector<double>> extended,
                                     double tol) {
  using Kind = EquivalenceViolation::Kind;
  if (q.n_rewritten != static_cast<int>(sys.constraints.size()) ||
      q.n_original != sys.nvars) {
    throw std::invalid_argument("verify_equivalence: systems do not correspond");
  }
  EquivalenceReport report;
  auto record = [&](Kind kind, std::size_t sample, int constraint, double residual) {
    report.violations.push_back({kind, sample, constraint, residual});
  };

  for (std::size_t s = 0; s < samples.size(); ++s) {
    const auto& p = samples[s];
    const std::vector<double> lifted = lift_point(p, q.table);
    ++report.samples_checked;

    const bool in_original = sys.contains(p, tol);
    const bool in_quadratic = q.base.contains(lifted, tol);
    if (in_original) ++report.feasible_samples;
    if (in_original != in_quadratic) record(Kind::kMembership, s, -1, 0.0);

    const auto rewritten = q.rewritten();
    for (int i = 0; i < q.n_rewritten; ++i) {
      const Polynomial& original = sys.constraints[i].poly;
      const double diff = std::abs(rewritten[i].poly.eval(lifted) - original.eval(p));
      const double rel = diff / (1.0 + original.abs_eval(p));
      report.max_residual = std::max(report.max_residual, rel);
      if (rel > tol) record(Kind::kRewrite, s, i, rel);
    }
    const auto eqs = q.e_equations();
    for (std::size_t j = 0; j < eqs.size(); ++j) {
      const double rel =
          std::abs(eqs[j].poly.eval(lifted)) / (1.0 + eqs[j].poly.abs_eval(lifted));
      report.max_residual = std::max(report.max_residual, rel);
      if (rel > tol) record(Kind::kESet, s, static_cast<int>(j), rel);
    }
  }

  // Converse: an extended point of R(F~) has its u-values forced to the
  // monomial values by the E-set identities, so its x-part must lie in R(F).
  for (std::size_t s = 0; s < extended.size(); ++s) {
    const auto& pw = extended[s];
    if (static_cast<int>(pw.size()) != q.table.extended_nvars()) {
      throw std::invalid_argument("verify_equivalence: extended point has wrong length");
    }
    ++report.extended_checked;
    if (!q.base.contains(pw, tol)) continue;
    const std::span<const double> p(pw.data(), q.n_original);
    const std::vector<double> relifted = lift_point(p, q.table);
    double worst = 0.0;
    for (std::size_t i = 0; i < relifted.size(); ++i) {
      worst = std::max(worst, std::abs(relifted[i] - pw[i]) / (1.0 + std::abs(relifted[i])));
    }
    if (!sys.contains(p, tol)) record(Kind::kConverse, s, -1, worst);
  }
  return report;
}

}  // namespace pseudospec
