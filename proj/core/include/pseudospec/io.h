#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "pseudospec/encode.h"
#include "pseudospec/geometry.h"
#include "pseudospec/poly.h"
#include "pseudospec/quadratize.h"
#include "pseudospec/search.h"
#include "pseudospec/spectra.h"

namespace pseudospec {

/// Malformed or inconsistent input document.
class FormatError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view content);

// JSON documents. Matrix entries are upper-triangle triplets with 1-based
// positions: {"i": 1, "j": 2, "v": 0.5}.

/// {"vars": [...], "constraints": [{"poly": "...", "rel": ">="}], "box": [[lo, hi], ...]}
/// "box" is optional.
std::string poly_system_to_json(const PolySystem& sys, const Box* box = nullptr);
PolySystem poly_system_from_json(std::string_view text);
std::optional<Box> box_from_json(std::string_view text);

/// {"n", "vars", "aux": [{"name", "monomial"}], "constraints", "e_sets"}.
/// "constraints" holds only the rewritten originals; E-sets are regenerated
/// from the monomials on load and must match the stored ones.
std::string quad_system_to_json(const QuadSystem& q);
QuadSystem quad_system_from_json(std::string_view text);

std::string encoding_to_json(const PseudoSpecEncoding& enc);
PseudoSpecEncoding encoding_from_json(std::string_view text);

/// {"base": [triplets], "params": [[triplets], ...], "size": N}.
std::string pencil_to_json(const MatrixPencil& pencil);
MatrixPencil pencil_from_json(std::string_view text);

std::string to_json(const QcqpReport& rep);
std::string to_json(const BoundaryRankReport& rep);
std::string to_json(const HullMembership& rep);
std::string to_json(const MembershipReport& rep);
std::string to_json(const TraceSliceReport& rep);

// CSV: one header line, then comma-separated rows in shortest round-trip form.

void write_points_csv(std::ostream& out, std::span<const std::string> header,
                      std::span<const Point> points);
/// Skips the header line; throws FormatError on ragged or non-numeric rows.
std::vector<Point> read_points_csv(std::istream& in);
/// label, lambda_1, ..., lambda_N per row.
void write_eigenvalue_csv(std::ostream& out, std::span<const std::string> labels,
                          std::span<const Eigen::VectorXd> eigenvalues);

struct SvgPolyline {
  std::vector<Point> points;  // 2D
  std::string stroke = "black";
  std::string fill = "none";
  bool closed = false;
};

/// Minimal SVG with the data box [x0, x1] x [y0, y1] mapped onto a
/// width x height canvas (y axis pointing up).
std::string svg_document(std::span<const SvgPolyline> lines, double x0, double x1, double y0,
                         double y1, int width = 400, int height = 400);

}  // namespace pseudospec
