#pragma once

#include "epsc/bodies.hpp"

#include <array>
#include <cstdint>
#include <vector>

namespace epsc {

enum class Cell : uint8_t { outside = 0, inside = 1, boundary = 2 };

struct Grid {
  int dim = 2;
  Vec lo;                      // corner of cell (0,0,0)
  double h = 0.0;
  std::array<int, 3> n{1, 1, 1};  // cells per axis; unused axes are 1
  std::vector<Cell> cells;

  size_t size() const { return cells.size(); }
  size_t index(int i, int j, int k) const {
    return static_cast<size_t>(i) + static_cast<size_t>(n[0]) * (static_cast<size_t>(j) + static_cast<size_t>(n[1]) * k);
  }
  std::array<int, 3> coords(size_t idx) const {
    int i = static_cast<int>(idx % n[0]);
    size_t r = idx / n[0];
    return {i, static_cast<int>(r % n[1]), static_cast<int>(r / n[1])};
  }
  Vec center(size_t idx) const;
  // Cell containing x, or -1 if outside the bounds.
  long locate(const Vec& x) const;
  bool solid(size_t idx) const { return cells[idx] != Cell::outside; }
  size_t count(Cell c) const;
  double diag() const;  // h * sqrt(dim)
};

// Bounds are the CSG bounding box inflated by 2h.
Grid rasterize(const BodyExpr& body, double h);
Grid rasterize_in(const BodyExpr& body, const Vec& lo, const std::array<int, 3>& n, double h);
Grid empty_like(const Grid& g);
// Bounds covering a union of boxes, inflated by margin, on a lattice of step h.
Grid frame_for(const std::vector<BBox>& boxes, double h, double margin);

struct GridMetrics {
  double diameter = 0.0;
  double diameter_err = 0.0;
  int boundary_components = 0;
  int connected_components = 0;
};
GridMetrics grid_metrics(const Grid& g);

enum class CellSet { inside, solid, boundary, outside };
bool in_set(Cell c, CellSet s);
Points centers_of(const Grid& g, CellSet s);
std::vector<size_t> indices_of(const Grid& g, CellSet s);

// Component labels (-1 for cells outside the set). moore = full neighbourhood, else face adjacency.
int label_components(const Grid& g, CellSet s, bool moore, std::vector<int>& labels);

// Distance from each cell center to the nearest center of a marked cell (exact separable EDT).
std::vector<double> distance_field(const Grid& g, const std::vector<uint8_t>& marked);

// Max pairwise distance between centers in the set.
double grid_diameter(const Grid& g, CellSet s);

}  // namespace epsc
