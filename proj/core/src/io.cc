#include "pseudospec/io.h"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "json.hpp"

namespace pseudospec {

using nlohmann::json;

namespace {

json parse_document(std::string_view text) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed JSON: ") + e.what());
  }
}

// Runs a field-reading lambda, turning type and missing-key errors into FormatError.
template <typename Fn>
auto reading(std::string_view what, Fn fn) {
  try {
    return fn();
  } catch (const json::exception& e) {
    throw FormatError(fmt::format("{}: {}", what, e.what()));
  }
}

json triplets(const SymMatrix& m) {
  json out = json::array();
  for (const auto& e : m.entries()) out.push_back({{"i", e.i + 1}, {"j", e.j + 1}, {"v", e.v}});
  return out;
}

SymMatrix matrix_from_triplets(const json& arr, int n) {
  std::vector<SymMatrix::Entry> entries;
  for (const auto& t : arr) {
    const int i = t.at("i").get<int>();
    const int j = t.at("j").get<int>();
    if (i < 1 || j < i || j > n) {
      throw FormatError(fmt::format("matrix entry ({}, {}) is not in the upper triangle of size {}",
                                    i, j, n));
    }
    entries.push_back({i - 1, j - 1, t.at("v").get<double>()});
  }
  return SymMatrix::from_entries(n, entries);
}

json constraints_json(const PolySystem& sys, std::span<const Constraint> cs) {
  json out = json::array();
  for (const auto& c : cs) {
    out.push_back({{"poly", to_string(c.poly, sys.var_names)}, {"rel", to_string(c.rel)}});
  }
  return out;
}

std::vector<Constraint> constraints_from_json(const json& arr,
                                              std::span<const std::string> names) {
  std::vector<Constraint> out;
  for (const auto& c : arr) {
    const auto text = c.at("poly").get<std::string>();
    Relation rel = Relation::kEq;
    if (c.contains("rel")) {
      try {
        rel = parse_relation(c.at("rel").get<std::string>());
      } catch (const std::invalid_argument& e) {
        throw FormatError(e.what());
      }
    }
    try {
      out.push_back({parse_poly(text, names), rel});
    } catch (const ParseError& e) {
      throw FormatError(fmt::format("\"{}\": {}", text, e.what()));
    }
  }
  return out;
}

std::vector<std::string> names_from_json(const json& doc) {
  auto names = doc.at("vars").get<std::vector<std::string>>();
  if (names.empty()) throw FormatError("\"vars\" is empty");
  return names;
}

}  // namespace

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
}

std::string poly_system_to_json(const PolySystem& sys, const Box* box) {
  json doc;
  doc["vars"] = sys.var_names.empty() ? default_var_names(sys.nvars) : sys.var_names;
  PolySystem named = sys;
  named.var_names = doc["vars"].get<std::vector<std::string>>();
  doc["constraints"] = constraints_json(named, named.constraints);
  if (box) {
    json b = json::array();
    for (const auto& [lo, hi] : *box) b.push_back({lo, hi});
    doc["box"] = b;
  }
  return doc.dump(2) + "\n";
}

PolySystem poly_system_from_json(std::string_view text) {
  const json doc = parse_document(text);
  return reading("polynomial system", [&] {
    PolySystem sys;
    sys.var_names = names_from_json(doc);
    sys.nvars = static_cast<int>(sys.var_names.size());
    sys.constraints = constraints_from_json(doc.at("constraints"), sys.var_names);
    sys.validate();
    return sys;
  });
}

std::optional<Box> box_from_json(std::string_view text) {
  const json doc = parse_document(text);
  if (!doc.contains("box")) return std::nullopt;
  return reading("box", [&] {
    Box box;
    for (const auto& b : doc.at("box")) {
      const double lo = b.at(0).get<double>();
      const double hi = b.at(1).get<double>();
      if (!(lo <= hi)) throw FormatError("box has lo > hi");
      box.emplace_back(lo, hi);
    }
    return std::optional<Box>(std::move(box));
  });
}

std::string quad_system_to_json(const QuadSystem& q) {
  const auto& names = q.base.var_names;
  const std::vector<std::string> original(names.begin(), names.begin() + q.n_original);
  json doc;
  doc["n"] = q.n_original;
  doc["vars"] = original;
  json aux = json::array();
  for (int a = 0; a < q.table.aux_count(); ++a) {
    aux.push_back({{"name", names[q.n_original + a]},
                   {"monomial", to_string(Polynomial::monomial(q.table.defs[a]), original)}});
  }
  doc["aux"] = aux;
  doc["constraints"] = constraints_json(q.base, q.rewritten());
  json sets = json::array();
  for (const auto& set : q.table.e_sets) {
    json s = json::array();
    for (const auto& e : set) s.push_back(to_string(e.poly, names));
    sets.push_back(s);
  }
  doc["e_sets"] = sets;
  return doc.dump(2) + "\n";
}

QuadSystem quad_system_from_json(std::string_view text) {
  const json doc = parse_document(text);
  return reading("quadratic system", [&] {
    const auto original = names_from_json(doc);
    const int n = static_cast<int>(original.size());
    if (doc.contains("n") && doc.at("n").get<int>() != n) {
      throw FormatError("\"n\" does not match the variable list");
    }
    std::vector<std::string> names = original;
    std::vector<Exponents> defs;
    for (const auto& a : doc.at("aux")) {
      const Polynomial mono = parse_poly(a.at("monomial").get<std::string>(), original);
      if (mono.terms().size() != 1 || mono.terms().begin()->second != 1.0) {
        throw FormatError("auxiliary definition is not a monic monomial");
      }
      defs.push_back(mono.terms().begin()->first);
      names.push_back(a.contains("name") ? a.at("name").get<std::string>()
                                         : "u" + std::to_string(defs.size()));
    }
    SubstitutionTable table;
    try {
      table = make_substitution_table(n, defs);
    } catch (const std::invalid_argument& e) {
      throw FormatError(e.what());
    }
    if (table.defs != defs) throw FormatError("auxiliary monomials are not in graded-lex order");

    if (doc.contains("e_sets")) {
      const auto& sets = doc.at("e_sets");
      if (sets.size() != table.e_sets.size()) throw FormatError("E-set count mismatch");
      for (std::size_t a = 0; a < sets.size(); ++a) {
        if (sets[a].size() != table.e_sets[a].size()) throw FormatError("E-set size mismatch");
        for (std::size_t j = 0; j < sets[a].size(); ++j) {
          if (!(parse_poly(sets[a][j].get<std::string>(), names) == table.e_sets[a][j].poly)) {
            throw FormatError(fmt::format("E-set {} entry {} does not match its monomial", a + 1,
                                          j + 1));
          }
        }
      }
    }
    PolySystem rewritten;
    rewritten.nvars = static_cast<int>(names.size());
    rewritten.var_names = names;
    rewritten.constraints = constraints_from_json(doc.at("constraints"), names);
    for (const auto& c : rewritten.constraints) {
      if (c.poly.total_degree() > 2) throw FormatError("constraint of degree above 2");
    }
    return assemble_quad_system(std::move(rewritten), std::move(table));
  });
}

std::string encoding_to_json(const PseudoSpecEncoding& enc) {
  const auto& l = enc.layout;
  json doc;
  doc["layout"] = {{"kind", std::string(to_string(l.kind))}, {"n", l.n},
                   {"n_project", l.n_project},             {"k", l.k},
                   {"m", l.m},                             {"N", l.N}};
  json cs = json::array();
  json rhs = json::array();
  for (const auto& c : enc.constraints) {
    cs.push_back({{"kind", std::string(to_string(c.kind))},
                  {"a", c.index},
                  {"rhs", c.rhs},
                  {"entries", triplets(c.matrix)}});
    rhs.push_back(c.rhs);
  }
  doc["constraints"] = cs;
  doc["rhs"] = rhs;
  json proj = json::array();
  for (const auto& p : enc.projection) proj.push_back(triplets(p));
  doc["projection"] = proj;
  doc["trace_bound"] = enc.trace_bound ? json(*enc.trace_bound) : json(nullptr);
  return doc.dump(2) + "\n";
}

PseudoSpecEncoding encoding_from_json(std::string_view text) {
  const json doc = parse_document(text);
  return reading("encoding", [&] {
    const json& lj = doc.at("layout");
    const auto kind = lj.at("kind").get<std::string>();
    PseudoSpecEncoding enc;
    const int n = lj.at("n").get<int>();
    const int n_project = lj.at("n_project").get<int>();
    if (n < 0 || n_project < 0 || n_project > n) throw FormatError("bad layout sizes");
    if (kind == "strict") {
      const int k = lj.at("k").get<int>();
      if (k < 0) throw FormatError("bad layout sizes");
      enc.layout = VariableLayout::strict(n, n_project, k);
    } else if (kind == "compact") {
      const int m = lj.at("m").get<int>();
      if (m < 0) throw FormatError("bad layout sizes");
      enc.layout = VariableLayout::compact(n, n_project, m);
    } else {
      throw FormatError("unknown layout kind \"" + kind + "\"");
    }
    if (lj.contains("N") && lj.at("N").get<int>() != enc.layout.N) {
      throw FormatError("layout N does not match its block sizes");
    }
    const int size = enc.layout.N;
    for (const auto& c : doc.at("constraints")) {
      EncodingConstraint ec;
      try {
        ec.kind = parse_constraint_kind(c.at("kind").get<std::string>());
      } catch (const std::invalid_argument& e) {
        throw FormatError(e.what());
      }
      ec.index = c.value("a", 0);
      ec.rhs = c.at("rhs").get<double>();
      ec.matrix = matrix_from_triplets(c.at("entries"), size);
      enc.constraints.push_back(std::move(ec));
    }
    if (doc.contains("rhs")) {
      const auto rhs = doc.at("rhs").get<std::vector<double>>();
      if (rhs.size() != enc.constraints.size()) throw FormatError("rhs list length mismatch");
      for (std::size_t i = 0; i < rhs.size(); ++i) {
        if (rhs[i] != enc.constraints[i].rhs) throw FormatError("rhs list disagrees with constraints");
      }
    }
    for (const auto& p : doc.at("projection")) enc.projection.push_back(matrix_from_triplets(p, size));
    if (doc.contains("trace_bound") && !doc.at("trace_bound").is_null()) {
      enc.trace_bound = doc.at("trace_bound").get<double>();
    }
    try {
      enc.validate();
    } catch (const std::invalid_argument& e) {
      throw FormatError(e.what());
    }
    return enc;
  });
}

std::string pencil_to_json(const MatrixPencil& pencil) {
  json doc;
  doc["size"] = pencil.size();
  doc["base"] = triplets(pencil.base);
  json params = json::array();
  for (const auto& p : pencil.params) params.push_back(triplets(p));
  doc["params"] = params;
  return doc.dump(2) + "\n";
}

MatrixPencil pencil_from_json(std::string_view text) {
  const json doc = parse_document(text);
  return reading("pencil", [&] {
    const int n = doc.at("size").get<int>();
    if (n < 1) throw FormatError("pencil size must be positive");
    MatrixPencil p;
    p.base = matrix_from_triplets(doc.at("base"), n);
    for (const auto& m : doc.at("params")) p.params.push_back(matrix_from_triplets(m, n));
    p.validate();
    return p;
  });
}

std::string to_json(const QcqpReport& rep) {
  json doc = {{"samples", rep.samples}, {"feasible", rep.feasible}, {"brute_min", rep.brute_min},
              {"hull_min", rep.hull_min}, {"gap", rep.gap},       {"argmin", rep.argmin}};
  return doc.dump(2) + "\n";
}

std::string to_json(const BoundaryRankReport& rep) {
  json entries = json::array();
  for (const auto& e : rep.entries) {
    entries.push_back({{"parameter", e.parameter},
                       {"min_eigenvalue", e.min_eigenvalue},
                       {"max_eigenvalue", e.max_eigenvalue},
                       {"psd", e.psd},
                       {"singular", e.singular}});
  }
  json doc = {{"entries", entries}, {"violations", rep.violations}, {"ok", rep.ok()}};
  return doc.dump(2) + "\n";
}

std::string to_json(const HullMembership& rep) {
  json doc = {{"inside", rep.inside}, {"infeasibility", rep.infeasibility}};
  if (rep.inside) {
    doc["weights"] = rep.weights;
  } else {
    doc["separator"] = rep.separator;
  }
  return doc.dump(2) + "\n";
}

std::string to_json(const MembershipReport& rep) {
  json doc = {{"psd", rep.psd},
              {"rank_one", rep.rank_one},
              {"constraints_ok", rep.constraints_ok},
              {"min_eigenvalue", rep.min_eigenvalue},
              {"second_eigenvalue", rep.second_eigenvalue},
              {"max_eigenvalue", rep.max_eigenvalue},
              {"max_residual", rep.max_residual},
              {"worst_constraint", rep.worst_constraint + 1}};
  return doc.dump(2) + "\n";
}

std::string to_json(const TraceSliceReport& rep) {
  json doc = {{"n", rep.n},
              {"samples", rep.samples},
              {"max_reconstruction_error", rep.max_reconstruction_error},
              {"min_weight", rep.min_weight},
              {"max_weight_sum_error", rep.max_weight_sum_error},
              {"max_term_trace_error", rep.max_term_trace_error},
              {"max_term_rank_two", rep.max_term_rank_two}};
  return doc.dump(2) + "\n";
}

void write_points_csv(std::ostream& out, std::span<const std::string> header,
                      std::span<const Point> points) {
  out << fmt::format("{}\n", fmt::join(header, ","));
  for (const auto& p : points) {
    if (p.size() != header.size()) throw std::invalid_argument("write_points_csv: row width");
    out << fmt::format("{}\n", fmt::join(p, ","));
  }
}

std::vector<Point> read_points_csv(std::istream& in) {
  std::vector<Point> out;
  std::string line;
  if (!std::getline(in, line)) return out;
  std::size_t width = 0;
  for (std::size_t row = 2; std::getline(in, line); ++row) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    Point p;
    std::size_t pos = 0;
    while (true) {
      const std::size_t comma = std::min(line.find(',', pos), line.size());
      double v = 0.0;
      const char* first = line.data() + pos;
      const char* last = line.data() + comma;
      const auto [ptr, ec] = std::from_chars(first, last, v);
      if (ec != std::errc() || ptr != last) {
        throw FormatError(fmt::format("CSV row {}: bad number", row));
      }
      p.push_back(v);
      if (comma == line.size()) break;
      pos = comma + 1;
    }
    if (width == 0) width = p.size();
    if (p.size() != width) throw FormatError(fmt::format("CSV row {}: ragged row", row));
    out.push_back(std::move(p));
  }
  return out;
}

void write_eigenvalue_csv(std::ostream& out, std::span<const std::string> labels,
                          std::span<const Eigen::VectorXd> eigenvalues) {
  if (labels.size() != eigenvalues.size()) {
    throw std::invalid_argument("write_eigenvalue_csv: label count mismatch");
  }
  const Eigen::Index n = eigenvalues.empty() ? 0 : eigenvalues[0].size();
  out << "label";
  for (Eigen::Index i = 0; i < n; ++i) out << ",lambda" << i + 1;
  out << "\n";
  for (std::size_t r = 0; r < labels.size(); ++r) {
    out << labels[r];
    for (Eigen::Index i = 0; i < eigenvalues[r].size(); ++i) {
      out << fmt::format(",{}", eigenvalues[r](i));
    }
    out << "\n";
  }
}

std::string svg_document(std::span<const SvgPolyline> lines, double x0, double x1, double y0,
                         double y1, int width, int height) {
  if (!(x1 > x0) || !(y1 > y0)) throw std::invalid_argument("svg_document: empty data box");
  const double sx = width / (x1 - x0);
  const double sy = height / (y1 - y0);
  std::string out = fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" "
      "viewBox=\"0 0 {} {}\">\n",
      width, height, width, height);
  for (const auto& l : lines) {
    std::string pts;
    for (const auto& p : l.points) {
      if (p.size() != 2) throw std::invalid_argument("svg_document: points must be 2D");
      pts += fmt::format("{}{:.3f},{:.3f}", pts.empty() ? "" : " ", (p[0] - x0) * sx,
                         (y1 - p[1]) * sy);
    }
    out += fmt::format("  <{} points=\"{}\" fill=\"{}\" stroke=\"{}\" stroke-width=\"1\"/>\n",
                       l.closed ? "polygon" : "polyline", pts, l.fill, l.stroke);
  }
  out += "</svg>\n";
  return out;
}

}  // namespace pseudospec
