#include "commands.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <functional>
#include <fstream>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>

#include <fmt/format.h>
#include <fmt/ostream.h>
#include <fmt/ranges.h>

#include "CLI11.hpp"
#include "json.hpp"
#include "pseudospec/encode.h"
#include "pseudospec/geometry.h"
#include "pseudospec/io.h"
#include "pseudospec/quadratize.h"
#include "pseudospec/search.h"

namespace pseudospec::cli {

namespace {

using nlohmann::json;

struct LoadedSystem {
  PolySystem original;
  QuadSystem quad;
  std::optional<Box> box;
};

LoadedSystem load_system(const std::string& path) {
  const std::string text = read_file(path);
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw FormatError(path + ": malformed JSON: " + e.what());
  }
  LoadedSystem out;
  if (doc.is_object() && doc.contains("aux")) {
    out.quad = quad_system_from_json(text);
    out.original = recover_original(out.quad);
  } else {
    out.original = poly_system_from_json(text);
    out.quad = quadratize(out.original);
  }
  out.box = box_from_json(text);
  return out;
}

Box parse_box(const std::string& text, int dim) {
  const auto comma = text.find(',');
  if (comma == std::string::npos) throw FormatError("--box expects lo,hi");
  double lo = 0.0;
  double hi = 0.0;
  try {
    lo = std::stod(text.substr(0, comma));
    hi = std::stod(text.substr(comma + 1));
  } catch (const std::exception&) {
    throw FormatError("--box expects lo,hi");
  }
  if (!(lo <= hi)) throw FormatError("--box has lo > hi");
  return Box(dim, {lo, hi});
}

Box choose_box(const std::string& flag, const std::optional<Box>& from_file, int dim) {
  if (!flag.empty()) return parse_box(flag, dim);
  if (from_file) {
    if (static_cast<int>(from_file->size()) != dim) throw FormatError("box dimension mismatch");
    return *from_file;
  }
  return Box(dim, {-2.0, 2.0});
}

void emit(const std::string& out_path, const std::string& content, std::ostream& out) {
  if (out_path.empty()) {
    out << content;
  } else {
    write_file(out_path, content);
  }
}

std::string format_point(std::span<const double> p) {
  return fmt::format("({})", fmt::join(p, ", "));
}

int cmd_quadratize(const std::string& in, const std::string& out_path, std::ostream& out,
                   std::ostream& err) {
  const PolySystem sys = poly_system_from_json(read_file(in));
  const QuadSystem q = quadratize(sys);
  emit(out_path, quad_system_to_json(q), out);
  std::ostream& log = out_path.empty() ? err : out;
  fmt::print(log, "variables: {}, auxiliary: {}, constraints: {} rewritten + {} E-set\n",
             q.n_original, q.table.aux_count(), q.n_rewritten, q.e_equations().size());
  return kExitOk;
}

struct EncodeFlags {
  bool compact = false;
  std::optional<double> trace_bound;
  std::string box;
  int samples = 10'000;
  std::uint64_t seed = 0;
};

std::string constraint_counts(const PseudoSpecEncoding& enc) {
  using Kind = EncodingConstraint::Kind;
  std::vector<std::string> parts;
  for (Kind k : {Kind::kF, Kind::kQ, Kind::kG, Kind::kA0, Kind::kYZ, Kind::kTrace}) {
    const auto n = std::count_if(enc.constraints.begin(), enc.constraints.end(),
                                 [&](const EncodingConstraint& c) { return c.kind == k; });
    if (n > 0) parts.push_back(fmt::format("{} {}", to_string(k), n));
  }
  return fmt::format("{} (total {})", fmt::join(parts, ", "), enc.constraints.size());
}

int cmd_encode(const std::string& in, const EncodeFlags& flags, const std::string& out_path,
               std::ostream& out, std::ostream& err) {
  const LoadedSystem loaded = load_system(in);
  const QuadSystem& q = loaded.quad;
  std::ostream& log = out_path.empty() ? err : out;
  if (flags.compact) {
    CompactOptions opts;
    opts.trace_bound = flags.trace_bound;
    opts.samples = flags.samples;
    opts.seed = flags.seed;
    if (!flags.trace_bound) opts.box = choose_box(flags.box, loaded.box, q.n_original);
    const CompactEncoding ce = encode_compact(q, opts);
    const auto& l = ce.encoding.layout;
    emit(out_path, encoding_to_json(ce.encoding), out);
    fmt::print(log, "encoding: compact\nN = {} (n = {}, m = {})\nconstraints: {}\nB = {}\n", l.N,
               l.n, l.m, constraint_counts(ce.encoding), *ce.encoding.trace_bound);
    return kExitOk;
  }
  if (flags.trace_bound) fmt::print(log, "note: --B only applies with --compact\n");
  const StrictEncoding se = encode_strict(q);
  const auto& l = se.encoding.layout;
  emit(out_path, encoding_to_json(se.encoding), out);
  fmt::print(log, "encoding: strict\nN = {} (n = {}, k = {})\nconstraints: {}\n", l.N, l.n, l.k,
             constraint_counts(se.encoding));
  const auto closed = std::count_if(q.base.constraints.begin(), q.base.constraints.end(),
                                    [](const Constraint& c) {
                                      return c.rel == Relation::kGe || c.rel == Relation::kLe;
                                    });
  if (closed > 0) {
    fmt::print(log,
               "note: {} non-strict inequality constraint(s) took the slack-square route "
               "(f - s^2 = 0 with a slack variable); --compact gives the trace-bounded form\n",
               closed);
  }
  return kExitOk;
}

struct VerifyFlags {
  int samples = 500;
  std::uint64_t seed = 0;
  double tol = 1e-7;
  std::string box;
};

int cmd_verify(const std::string& enc_path, const std::string& sys_path, const VerifyFlags& flags,
               std::ostream& out) {
  const PseudoSpecEncoding enc = encoding_from_json(read_file(enc_path));
  const LoadedSystem loaded = load_system(sys_path);
  const PolySystem& original = loaded.original;

  std::function<Lift(std::span<const double>)> lift_fn;
  VariableLayout expected;
  std::optional<StrictEncoding> strict;
  std::optional<CompactEncoding> compact;
  if (enc.layout.kind == VariableLayout::Kind::kStrict) {
    strict = encode_strict(loaded.quad);
    expected = strict->encoding.layout;
    lift_fn = [&](std::span<const double> p) { return strict->lift_original(p); };
  } else {
    CompactOptions opts;
    opts.trace_bound = enc.trace_bound;
    compact = encode_compact(loaded.quad, opts);
    expected = compact->encoding.layout;
    lift_fn = [&](std::span<const double> p) { return compact->lift_original(p); };
  }
  if (!(expected == enc.layout)) {
    fmt::print(out, "layout mismatch: encoding has N = {}, system gives N = {}\n", enc.layout.N,
               expected.N);
    return kExitVerify;
  }
  if (flags.samples == 0) {
    fmt::print(out, "samples: 0\nforward: 0 checked, 0 violations\nreverse: 0 checked, 0 violations\n");
    return kExitOk;
  }

  std::mt19937_64 rng(flags.seed);
  const Box box = choose_box(flags.box, loaded.box, original.nvars);
  const auto points = sample_constraint_set(original, box, flags.samples, rng);
  std::size_t forward_bad = 0;
  std::size_t forward_checked = 0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto& p = points[i];
    Lift l;
    try {
      l = lift_fn(p);
    } catch (const LiftError&) {
      continue;  // on the closure but outside the strict set
    }
    ++forward_checked;
    const MembershipReport rep = check_rank_one_member(l.x, enc, flags.tol);
    const std::vector<double> back = project(l.x, enc);
    double proj_err = 0.0;
    for (std::size_t b = 0; b < p.size(); ++b) {
      proj_err = std::max(proj_err, std::abs(back[b] - p[b]) / (1.0 + std::abs(p[b])));
    }
    if (rep.ok() && proj_err <= 1e-9) continue;
    ++forward_bad;
    if (forward_bad <= 20) {
      std::string where = "-";
      if (rep.worst_constraint >= 0) {
        const auto& c = enc.constraints[rep.worst_constraint];
        where = fmt::format("#{} {}{}", rep.worst_constraint + 1, to_string(c.kind),
                            c.index > 0 ? std::to_string(c.index) : "");
      }
      fmt::print(out,
                 "forward violation at {}: constraint {} residual {:.3e}, min eigenvalue {:.3e}, "
                 "projection error {:.3e}\n",
                 format_point(p), where, rep.max_residual, rep.min_eigenvalue, proj_err);
    }
  }

  const auto members = sample_rank_one_members(enc, rng, flags.samples, 20 * flags.samples);
  std::size_t reverse_bad = 0;
  for (const auto& v : members) {
    const SymMatrix x = SymMatrix::outer(v);
    const std::vector<double> p = project(x, enc);
    if (original.contains(p, flags.tol)) continue;
    ++reverse_bad;
    if (reverse_bad <= 20) {
      fmt::print(out, "reverse violation: rank-one member projects to {} outside the set\n",
                 format_point(p));
    }
  }
  fmt::print(out, "samples: {}\nforward: {} checked, {} violations\nreverse: {} checked, {} violations\n",
             flags.samples, forward_checked, forward_bad, members.size(), reverse_bad);
  return forward_bad + reverse_bad == 0 ? kExitOk : kExitVerify;
}

MatrixPencil pencil_for(int example) {
  if (example == 1) return example1_pencil();
  if (example == 2) return example2_pencil();
  throw FormatError("example must be 1 or 2");
}

std::vector<std::string> param_names(int d) {
  static const std::vector<std::string> kNames = {"x", "y", "z"};
  if (d <= 3) return {kNames.begin(), kNames.begin() + d};
  return default_var_names(d, "t");
}

int cmd_rank1(int example, const std::string& pencil_path, const std::string& box_flag,
              const EnumerateOptions& opts, const std::string& out_path, std::ostream& out,
              std::ostream& err) {
  const MatrixPencil pencil =
      pencil_path.empty() ? pencil_for(example) : pencil_from_json(read_file(pencil_path));
  const Box box = box_flag.empty() ? Box(pencil.dimension(), {-2.0, 2.0})
                                   : parse_box(box_flag, pencil.dimension());
  const RankOneLocus locus = enumerate_rank_one(pencil, box, opts);
  std::ostringstream csv;
  write_points_csv(csv, param_names(pencil.dimension()), locus.points);
  emit(out_path, csv.str(), out);
  std::ostream& log = out_path.empty() ? err : out;
  fmt::print(log, "rank-one points: {} ({} grid candidates, {} discarded refinements)\n",
             locus.points.size(), locus.candidates, locus.newton_failures);
  return kExitOk;
}

QcqpInstance qcqp_from_file(const std::string& path) {
  const std::string text = read_file(path);
  QcqpInstance inst;
  inst.constraints = poly_system_from_json(text);
  const auto box = box_from_json(text);
  if (!box) throw FormatError("qcqp instance needs a \"box\"");
  inst.box = *box;
  const json doc = json::parse(text);
  if (!doc.contains("objective")) throw FormatError("qcqp instance needs an \"objective\"");
  try {
    const auto rows = doc.at("objective").get<std::vector<std::vector<double>>>();
    const int n = static_cast<int>(rows.size());
    Eigen::MatrixXd a(n, n);
    for (int i = 0; i < n; ++i) {
      if (static_cast<int>(rows[i].size()) != n) throw FormatError("objective is not square");
      for (int j = 0; j < n; ++j) a(i, j) = rows[i][j];
    }
    inst.objective = SymMatrix::from_dense(a);
  } catch (const json::exception& e) {
    throw FormatError(std::string("objective: ") + e.what());
  }
  return inst;
}

int cmd_qcqp(const std::string& instance, int samples, std::uint64_t seed,
             const std::string& out_path, std::ostream& out) {
  QcqpInstance inst;
  if (instance == "circle") {
    inst = circle_instance();
  } else if (instance == "four-point") {
    inst = four_point_instance();
  } else {
    inst = qcqp_from_file(instance);
  }
  std::mt19937_64 rng(seed);
  const QcqpReport rep = qcqp_check(inst, samples, rng);
  emit(out_path, to_json(rep), out);
  if (rep.feasible > 0 && rep.hull_min > rep.brute_min) return kExitVerify;
  return kExitOk;
}

int cmd_trace_slice(int n, int samples, std::uint64_t seed, double tol, std::ostream& out) {
  std::mt19937_64 rng(seed);
  const TraceSliceReport rep = trace_slice_pseudo_check(n, samples, rng);
  out << to_json(rep);
  return rep.max_reconstruction_error <= tol ? kExitOk : kExitVerify;
}

void write_csv_file(const std::filesystem::path& path, std::span<const std::string> header,
                    std::span<const Point> rows) {
  std::ostringstream csv;
  write_points_csv(csv, header, rows);
  write_file(path.string(), csv.str());
}

int example_one(const std::filesystem::path& dir, int count, double tol, std::ostream& out) {
  const MatrixPencil pencil = example1_pencil();
  const Point center = {0.5, 0.0};
  const auto boundary = boundary_ray_points(pencil, center, count);
  const RankOneLocus locus = sample_rank_one_boundary(pencil, center, count, tol);

  double worst = 0.0;
  std::vector<Point> boundary_rows;
  for (const auto& p : boundary) {
    const double r = p[0] * (1.0 - p[0]) - p[1] * p[1];
    worst = std::max(worst, std::abs(r));
    boundary_rows.push_back({p[0], p[1], r});
  }
  std::vector<Point> rank_rows;
  for (std::size_t i = 0; i < locus.points.size(); ++i) {
    const auto& p = locus.points[i];
    rank_rows.push_back({p[0], p[1], locus.factors[i](0), locus.factors[i](1)});
  }
  write_csv_file(dir / "boundary.csv", std::vector<std::string>{"x", "y", "residual"},
                 boundary_rows);
  write_csv_file(dir / "rank_one.csv", std::vector<std::string>{"x", "y", "w1", "w2"}, rank_rows);

  std::vector<SvgPolyline> lines(2);
  lines[0].points = boundary;
  lines[0].closed = true;
  lines[0].fill = "#cfe8cf";
  lines[0].stroke = "none";
  lines[1].points = locus.points;
  lines[1].points.push_back(locus.points.front());
  lines[1].stroke = "green";
  write_file((dir / "region.svg").string(), svg_document(lines, -0.1, 1.1, -0.6, 0.6));

  fmt::print(out,
             "boundary samples: {}\nrank-one samples: {}\nmax |x(1-x) - y^2| on boundary: {:.3e}\n",
             boundary.size(), locus.points.size(), worst);
  return worst <= 1e-9 && locus.points.size() == boundary.size() ? kExitOk : kExitVerify;
}

int example_two(const std::filesystem::path& dir, const EnumerateOptions& opts,
                std::ostream& out) {
  const MatrixPencil pencil = example2_pencil();
  const RankOneLocus locus = enumerate_rank_one(pencil, Box(3, {-2.0, 2.0}), opts);
  const auto& pts = locus.points;
  write_csv_file(dir / "points.csv", std::vector<std::string>{"x", "y", "z"}, pts);

  std::vector<RankCombination> combos;
  std::vector<Point> edges;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      combos.push_back({{pts[i], pts[j]}, {0.5, 0.5}});
      edges.push_back({double(i + 1), double(j + 1), pts[i][0], pts[i][1], pts[i][2], pts[j][0],
                       pts[j][1], pts[j][2]});
    }
  }
  const BoundaryRankReport rank = boundary_rank_check(pencil, combos);
  std::vector<Point> mids;
  for (const auto& e : rank.entries) {
    mids.push_back({e.parameter[0], e.parameter[1], e.parameter[2], e.min_eigenvalue,
                    e.max_eigenvalue, e.singular ? 1.0 : 0.0});
  }
  write_csv_file(dir / "midpoints.csv",
                 std::vector<std::string>{"x", "y", "z", "min_eigenvalue", "max_eigenvalue",
                                          "singular"},
                 mids);
  write_csv_file(dir / "edges.csv",
                 std::vector<std::string>{"i", "j", "x1", "y1", "z1", "x2", "y2", "z2"}, edges);

  json report = json::parse(to_json(rank));
  report["points"] = pts;
  if (pts.size() == 4) {
    Eigen::Matrix3d diff;
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) diff(r, c) = pts[r + 1][c] - pts[0][c];
    }
    report["volume"] = std::abs(diff.determinant()) / 6.0;
  }
  write_file((dir / "report.json").string(), report.dump(2) + "\n");

  fmt::print(out, "rank-one points: {}\nsingular midpoints: {} of {}\n", pts.size(),
             rank.entries.size() - rank.violations, rank.entries.size());
  return pts.size() == 4 && rank.ok() ? kExitOk : kExitVerify;
}

int cmd_example(int which, const std::string& dir, int count, const EnumerateOptions& opts,
                std::ostream& out) {
  std::filesystem::create_directories(dir);
  if (which == 1) return example_one(dir, count, opts.tol, out);
  if (which == 2) return example_two(dir, opts, out);
  throw FormatError("example must be 1 or 2");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Quadratization, semidefinite lifting and rank-one search for polynomial systems",
               "pseudospec"};
  app.require_subcommand(1);

  std::string in;
  std::string in2;
  std::string out_path;
  std::string box;
  double tol = 0.0;
  double grid = 0.05;
  int samples = -1;
  std::uint64_t seed = 0;
  EncodeFlags encode_flags;
  double trace_bound = 0.0;
  int which = 0;
  int n = 3;
  std::string pencil_path;
  std::string instance = "circle";
  unsigned threads = 0;

  auto* quad = app.add_subcommand("quadratize", "Rewrite a polynomial system with degree <= 2");
  quad->add_option("input", in, "Polynomial system JSON")->required();
  quad->add_option("--out", out_path, "Output file (default stdout)");

  auto* enc = app.add_subcommand("encode", "Build the semidefinite encoding of a system");
  enc->add_option("input", in, "Quadratic or polynomial system JSON")->required();
  enc->add_flag("--compact", encode_flags.compact, "Trace-bounded encoding for >= and =");
  auto* b_opt = enc->add_option("--B", trace_bound, "Trace bound (compact)");
  enc->add_option("--box", box, "Sampling box lo,hi for choosing B");
  enc->add_option("--samples", samples, "Samples for choosing B");
  enc->add_option("--seed", seed, "Random seed");
  enc->add_option("--out", out_path, "Output file (default stdout)");

  auto* ver = app.add_subcommand("verify", "Check an encoding against its system");
  ver->add_option("encoding", in, "Encoding JSON")->required();
  ver->add_option("system", in2, "System JSON")->required();
  ver->add_option("--samples", samples, "Points sampled in each direction");
  ver->add_option("--seed", seed, "Random seed");
  ver->add_option("--tol", tol, "Membership tolerance");
  ver->add_option("--box", box, "Sampling box lo,hi");

  auto* r1 = app.add_subcommand("rank1", "Enumerate rank-one points of a matrix pencil");
  r1->add_option("--example", which, "Built-in pencil (1 or 2)");
  r1->add_option("--pencil", pencil_path, "Pencil JSON");
  r1->add_option("--box", box, "Search box lo,hi per parameter");
  r1->add_option("--grid", grid, "Grid resolution");
  r1->add_option("--tol", tol, "Rank-one tolerance");
  r1->add_option("--threads", threads, "Worker threads (0 = all cores)");
  r1->add_option("--out", out_path, "CSV output (default stdout)");

  auto* qc = app.add_subcommand("qcqp", "Compare sampled QCQP minimum with its lifted value");
  qc->add_option("instance", instance, "circle, four-point, or an instance JSON");
  qc->add_option("--samples", samples, "Sample count");
  qc->add_option("--seed", seed, "Random seed");
  qc->add_option("--out", out_path, "Report file (default stdout)");

  auto* ex = app.add_subcommand("example", "Emit data files for the worked examples");
  ex->add_option("which", which, "1 or 2")->required()->check(CLI::Range(1, 2));
  std::string out_dir = ".";
  ex->add_option("--out", out_dir, "Output directory");
  ex->add_option("--grid", grid, "Grid resolution (example 2)");
  ex->add_option("--tol", tol, "Rank-one tolerance");
  ex->add_option("--samples", samples, "Boundary samples (example 1)");

  auto* ts = app.add_subcommand("trace-slice", "Decompose random trace-one PSD matrices");
  ts->add_option("--n", n, "Matrix size (2..6)");
  ts->add_option("--samples", samples, "Sample count");
  ts->add_option("--seed", seed, "Random seed");
  ts->add_option("--tol", tol, "Allowed reconstruction error");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kExitInput;
  }

  auto or_default = [](auto value, auto unset, auto fallback) {
    return value == unset ? fallback : value;
  };
  EnumerateOptions enum_opts;
  enum_opts.grid_res = grid;
  enum_opts.tol = or_default(tol, 0.0, 1e-9);
  enum_opts.threads = threads;

  try {
    if (*quad) return cmd_quadratize(in, out_path, out, err);
    if (*enc) {
      if (*b_opt) encode_flags.trace_bound = trace_bound;
      encode_flags.box = box;
      encode_flags.samples = or_default(samples, -1, 10'000);
      encode_flags.seed = seed;
      return cmd_encode(in, encode_flags, out_path, out, err);
    }
    if (*ver) {
      VerifyFlags vf;
      vf.samples = or_default(samples, -1, 500);
      vf.seed = seed;
      vf.tol = or_default(tol, 0.0, 1e-7);
      vf.box = box;
      if (vf.samples < 0) throw FormatError("--samples must be >= 0");
      return cmd_verify(in, in2, vf, out);
    }
    if (*r1) {
      if (which == 0 && pencil_path.empty()) throw FormatError("rank1 needs --example or --pencil");
      return cmd_rank1(which, pencil_path, box, enum_opts, out_path, out, err);
    }
    if (*qc) return cmd_qcqp(instance, or_default(samples, -1, 100'000), seed, out_path, out);
    if (*ex) return cmd_example(which, out_dir, or_default(samples, -1, 200), enum_opts, out);
    if (*ts) {
      return cmd_trace_slice(n, or_default(samples, -1, 100), seed, or_default(tol, 0.0, 1e-10),
                             out);
    }
  } catch (const std::exception& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kExitInput;
  }
  return kExitInput;
}

}  // namespace pseudospec::cli
