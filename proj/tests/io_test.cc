#include <cmath>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "json.hpp"
#include "pseudospec/io.h"
#include "support.h"

namespace pseudospec {
namespace {

using nlohmann::json;

TEST(PolySystemJson, RoundTripWithBox) {
  const PolySystem sys = make_system({"x", "y"}, {{"x*(1 - x) - y^2", Relation::kGe},
                                                  {"x + y - 0.25", Relation::kEq}});
  const Box box = {{0, 1}, {-0.5, 0.5}};
  const std::string text = poly_system_to_json(sys, &box);
  const PolySystem back = poly_system_from_json(text);
  EXPECT_EQ(back.var_names, sys.var_names);
  EXPECT_EQ(back.constraints, sys.constraints);
  EXPECT_EQ(box_from_json(text), box);
  EXPECT_FALSE(box_from_json(poly_system_to_json(sys)).has_value());
}

TEST(PolySystemJson, RelationDefaultsToEquation) {
  const PolySystem sys =
      poly_system_from_json(R"({"vars": ["x"], "constraints": [{"poly": "x^2 - 2"}]})");
  ASSERT_EQ(sys.constraints.size(), 1u);
  EXPECT_EQ(sys.constraints[0].rel, Relation::kEq);
}

TEST(PolySystemJson, MalformedInputs) {
  EXPECT_THROW(poly_system_from_json("{"), FormatError);
  EXPECT_THROW(poly_system_from_json(R"({"constraints": []})"), FormatError);
  EXPECT_THROW(poly_system_from_json(R"({"vars": ["x"], "constraints": [{"poly": "y"}]})"),
               FormatError);
  EXPECT_THROW(
      poly_system_from_json(R"({"vars": ["x"], "constraints": [{"poly": "x", "rel": "~"}]})"),
      FormatError);
  EXPECT_THROW(box_from_json(R"({"vars": ["x"], "constraints": [], "box": [[1, 0]]})"),
               FormatError);
}

TEST(QuadSystemJson, RoundTripRandomSystems) {
  std::mt19937_64 rng(12);
  for (int t = 0; t < 20; ++t) {
    const auto rs = testing::random_system(rng);
    const QuadSystem q = quadratize(rs.sys);
    const QuadSystem back = quad_system_from_json(quad_system_to_json(q));
    EXPECT_EQ(back.base.constraints, q.base.constraints);
    EXPECT_EQ(back.table.defs, q.table.defs);
    EXPECT_EQ(back.base.var_names, q.base.var_names);
  }
}

TEST(QuadSystemJson, RejectsTamperedESets) {
  const QuadSystem q = quadratize(make_system({"x"}, {{"x^3 - 1", Relation::kEq}}));
  json doc = json::parse(quad_system_to_json(q));
  doc["e_sets"][0][0] = "-x^2 + 2*u1";
  EXPECT_THROW(quad_system_from_json(doc.dump()), FormatError);
  json open = json::parse(quad_system_to_json(q));
  open["aux"][0]["monomial"] = "x^4";
  EXPECT_THROW(quad_system_from_json(open.dump()), FormatError);
}

TEST(EncodingJson, RoundTripPreservesMatrices) {
  const StrictEncoding e = encode_strict(quadratize(
      make_system({"x", "y"}, {{"x*(1 - x) - y^2", Relation::kGt}, {"x - y", Relation::kEq}})));
  const std::string text = encoding_to_json(e.encoding);
  const PseudoSpecEncoding back = encoding_from_json(text);
  EXPECT_EQ(back.layout, e.encoding.layout);
  ASSERT_EQ(back.constraints.size(), e.encoding.constraints.size());
  for (std::size_t i = 0; i < back.constraints.size(); ++i) {
    EXPECT_EQ(back.constraints[i].kind, e.encoding.constraints[i].kind);
    EXPECT_EQ(back.constraints[i].index, e.encoding.constraints[i].index);
    EXPECT_EQ(back.constraints[i].matrix, e.encoding.constraints[i].matrix);
    EXPECT_EQ(back.constraints[i].rhs, e.encoding.constraints[i].rhs);
  }
  EXPECT_EQ(back.projection, e.encoding.projection);
  EXPECT_EQ(encoding_to_json(back), text);
}

TEST(EncodingJson, TripletsAreOneBased) {
  const StrictEncoding e = encode_strict(quadratize(make_system({"x"}, {{"x", Relation::kGt}})));
  const json doc = json::parse(encoding_to_json(e.encoding));
  const json& a0 = doc["constraints"][3];
  EXPECT_EQ(a0["kind"], "A0");
  ASSERT_EQ(a0["entries"].size(), 1u);
  EXPECT_EQ(a0["entries"][0]["i"], 1);
  EXPECT_EQ(a0["entries"][0]["j"], 1);
  EXPECT_TRUE(doc["trace_bound"].is_null());
}

TEST(EncodingJson, CompactKeepsTraceBound) {
  CompactOptions opts;
  opts.trace_bound = 10.0;
  const CompactEncoding c =
      encode_compact(make_system({"x", "y"}, {{"1 - x^2 - y^2", Relation::kGe}}), opts);
  const PseudoSpecEncoding back = encoding_from_json(encoding_to_json(c.encoding));
  ASSERT_TRUE(back.trace_bound.has_value());
  EXPECT_EQ(*back.trace_bound, 10.0);
  EXPECT_EQ(back.layout.kind, VariableLayout::Kind::kCompact);
}

TEST(EncodingJson, MalformedInputs) {
  const StrictEncoding e = encode_strict(quadratize(make_system({"x"}, {{"x", Relation::kGt}})));
  json doc = json::parse(encoding_to_json(e.encoding));
  json bad_index = doc;
  bad_index["constraints"][0]["entries"][0]["i"] = 9;
  EXPECT_THROW(encoding_from_json(bad_index.dump()), FormatError);
  json bad_kind = doc;
  bad_kind["constraints"][0]["kind"] = "Z";
  EXPECT_THROW(encoding_from_json(bad_kind.dump()), FormatError);
  json bad_n = doc;
  bad_n["layout"]["N"] = 6;
  EXPECT_THROW(encoding_from_json(bad_n.dump()), FormatError);
  EXPECT_THROW(encoding_from_json("[]"), FormatError);
}

TEST(PencilJson, RoundTrip) {
  const MatrixPencil p = example2_pencil();
  const MatrixPencil back = pencil_from_json(pencil_to_json(p));
  EXPECT_EQ(back.base, p.base);
  EXPECT_EQ(back.params, p.params);
  EXPECT_THROW(pencil_from_json(R"({"size": 2, "base": [], "params": [[{"i": 3, "j": 1, "v": 1}]]})"),
               FormatError);
}

TEST(Reports, SerializeNonFiniteAsNull) {
  QcqpReport rep;
  rep.brute_min = std::numeric_limits<double>::infinity();
  rep.gap = std::nan("");
  const json doc = json::parse(to_json(rep));
  EXPECT_TRUE(doc["gap"].is_null());
  EXPECT_EQ(doc["feasible"], 0);
}

TEST(Csv, PointsRoundTripExactly) {
  std::mt19937_64 rng(2);
  const auto pts = testing::uniform_samples(rng, 3, 50, -1.0, 1.0);
  std::ostringstream out;
  write_points_csv(out, std::vector<std::string>{"x", "y", "z"}, pts);
  EXPECT_EQ(out.str().substr(0, 6), "x,y,z\n");
  std::istringstream in(out.str());
  EXPECT_EQ(read_points_csv(in), pts);
}

TEST(Csv, RaggedRowsRejected) {
  std::istringstream ragged("x,y\n1,2\n3\n");
  EXPECT_THROW(read_points_csv(ragged), FormatError);
  std::istringstream text("x\nabc\n");
  EXPECT_THROW(read_points_csv(text), FormatError);
}

TEST(Csv, EigenvalueRows) {
  std::ostringstream out;
  const std::vector<Eigen::VectorXd> ev = {Eigen::Vector2d(0.0, 1.5)};
  write_eigenvalue_csv(out, std::vector<std::string>{"m1"}, ev);
  EXPECT_NE(out.str().find("m1,0,1.5"), std::string::npos);
}

TEST(Svg, ContainsPolyline) {
  const std::vector<SvgPolyline> lines = {{{{0, 0}, {1, 1}}, "red", "none", true}};
  const std::string svg = svg_document(lines, 0, 1, 0, 1);
  EXPECT_EQ(svg.rfind("<svg", 0), 0u);
  EXPECT_NE(svg.find("<polygon"), std::string::npos);
  EXPECT_NE(svg.find("red"), std::string::npos);
}

}  // namespace
}  // namespace pseudospec
