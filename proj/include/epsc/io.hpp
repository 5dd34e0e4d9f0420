#pragma once

#include "epsc/helly.hpp"
#include "epsc/hull.hpp"
#include "epsc/projection.hpp"
#include "epsc/tomography.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace epsc {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

// Writes to path.tmp, then renames over path. Errors carry the path.
void write_file_atomic(const std::string& path, const std::string& bytes);
std::string read_file(const std::string& path);

// Body files are JSON. Either a gallery reference {"gallery": name, "params": {...}} or an
// expression tree: {"op": "union"|"intersect"|"subtract", "kids": [...]} with leaves
// {"op": "leaf", "prim": {"type": ..., ...}}.
Json body_to_json(const BodyExpr& b);
BodyExpr body_from_json(const Json& j);
BodyExpr load_body(const std::string& path);

// One point per row, comma separated. Blank lines and lines starting with '#' are skipped.
Points parse_points_csv(const std::string& text);
Points load_points_csv(const std::string& path);
std::string points_csv(const Points& P);
// i,j,k,cell rows for the solid cells.
std::string grid_csv(const Grid& g);

Json num(double x);  // non-finite values become strings
Json to_json(const Vec& v);
Json to_json(const Points& P);
Json to_json(const ClassVerdict& v);
Json to_json(const EpsHull2D& H);
Json to_json(const HellyReport& r);
Json to_json(const GammaPsiCurve& c);
Json to_json(const Lemma3Report& r);
Json to_json(const DistanceReport& r);
Json to_json(const Theorem6Result& r);
Json to_json(const Theorem7Report& r);
Json to_json(const Prop3Report& r);
Json to_json(const GridMetrics& m);

// {"schema_version": 1, "kind": kind, <payload fields>}.
Json report(const std::string& kind, const Json& payload);
std::string dump(const Json& j);

// One row per plane.
std::string theorem7_csv(const Theorem7Report& r);

struct SvgStyle {
  double width = 480;         // canvas width in px; height follows the aspect ratio
  double margin = 0.1;        // fraction of the data extent
  std::string fill = "#cfd8e3";
  std::string stroke = "#1f3b5a";
  double stroke_width = 1.5;  // px
};
// All numbers use %.6f. Arcs become native A segments with radius 1/eps.
std::string svg_hull(const EpsHull2D& H, const Points& W, const SvgStyle& s = {});
std::string svg_curves(const std::vector<GammaPsiCurve>& curves, const SvgStyle& s = {});
std::string svg_raster(const Grid& g, const SvgStyle& s = {});

}  // namespace epsc
