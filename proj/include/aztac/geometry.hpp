#pragma once

// Combinatorial model of the double Aztec diamond: region construction,
// tilings, compass domino types, particle extraction, height fields, level
// lines, and an exhaustive-enumeration oracle.
//
// Lattice conventions (fixed once and validated against the kernel tests):
//   diamond A: unit cells (i,j) with |i+1/2| + |j+1/2| <= n, black = (i+j) even;
//   diamond B: A translated by (2m, -(2m+1)) (opposite orientation);
//   oblique axis index  ell = i + j + n + 2,  even axes Y_{2r}, r = 1..n;
//   particle coordinate Y = j + m + 1 in [-n-m, n+m].
// Blue (outlier) dominoes: horizontal with black left cell (type S) or
// vertical with black bottom cell (type W); red (inlier): N and E.

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "aztac/common.hpp"

namespace aztac {

struct ModelShape {
  double a = 0.5;  // vertical-domino weight, in (0,1)
  int n = 2;       // diamond order, even
  int m = 0;       // inlier count M = 2m+1

  void validate() const;
};

struct Cell {
  int i = 0, j = 0;
  friend bool operator<(const Cell& a, const Cell& b) {
    return a.i < b.i || (a.i == b.i && a.j < b.j);
  }
  friend bool operator==(const Cell& a, const Cell& b) {
    return a.i == b.i && a.j == b.j;
  }
};

enum class Compass : std::uint8_t { N, S, E, W };
char compass_letter(Compass c);

inline bool cell_black(const Cell& c) { return ((c.i + c.j) % 2 + 2) % 2 == 0; }

class Region {
 public:
  enum class Kind { DoubleDiamond, SingleDiamond };

  // Two order-n diamonds with opposite colorings, offset along the
  // anti-diagonal so that exactly 2m+1 white squares remain on the
  // lower-left boundary of the union. Invariants asserted.
  static Region double_diamond(const ModelShape& shape);
  static Region single_diamond(int n);

  Kind kind() const { return kind_; }
  const ModelShape& shape() const { return shape_; }
  int cell_count() const { return static_cast<int>(cells_.size()); }
  const std::vector<Cell>& cells() const { return cells_; }
  bool contains(const Cell& c) const;
  int index_of(const Cell& c) const;  // -1 if absent

  // Double diamond only: Y coordinate and axis index of a cell.
  int y_of(const Cell& c) const { return c.j + shape_.m + 1; }
  int line_of(const Cell& c) const { return c.i + c.j + shape_.n + 2; }

  // Cells traversed by oblique axis ell (anti-diagonal i+j = ell-n-2),
  // ordered by decreasing Y.
  const std::vector<Cell>& line_cells(int ell) const;
  // Virtual (fixed-extension) dot/circle positions of axis ell: the sites
  // in [-n-m, n+m] above and below the actual cells.
  std::pair<std::vector<int>, std::vector<int>> virtual_sites(int ell) const;

  int n_lines() const { return 2 * shape_.n + 2; }  // ell = 0..2n+1

 private:
  Kind kind_ = Kind::DoubleDiamond;
  ModelShape shape_;
  std::vector<Cell> cells_;            // sorted
  std::vector<std::vector<Cell>> lines_;  // by ell
  void build_lines();
  void assert_invariants() const;
};

class Tiling {
 public:
  Tiling(const Region* region, std::vector<int> partner);

  const Region& region() const { return *region_; }
  int partner(int cell_idx) const { return partner_[cell_idx]; }
  int vertical_count() const { return vertical_count_; }

  // Compass type of the domino covering the cell at `cell_idx`.
  Compass compass_at(int cell_idx) const;
  bool blue_class_at(int cell_idx) const;  // S or W

  // One line per domino: "x y orientation compass" with a shape header.
  std::string serialize() const;
  static Tiling deserialize(const Region* region, const std::string& text);

  bool operator==(const Tiling& o) const { return partner_ == o.partner_; }

 private:
  const Region* region_;
  std::vector<int> partner_;
  int vertical_count_ = 0;
};

// a^{#vertical dominoes}
double tiling_weight(const Tiling& t, double a);

// Every perfect matching exactly once, deterministic order (cells in
// lexicographic order, horizontal partner tried before vertical).
// Returns the number of tilings; aborts with budget_exceeded beyond
// max_tilings. `reversed_order` flips the candidate order (for the
// stream-stability test).
long enumerate_tilings(const Region& region,
                       const std::function<void(const Tiling&)>& visit,
                       long max_tilings = 100000000L,
                       bool reversed_order = false);

struct ParticleConfig {
  // Even axes Y_{2r}, index r = 0..n; positions are Y values, sorted.
  std::vector<std::vector<int>> blue_dots;   // per r, size 2n (incl. virtual)
  std::vector<std::vector<int>> red_dots;    // per r, size 2m+1
  // Odd axes Y_{2r-1}, index r = 1..n+1 (2n+1 is the final axis).
  std::vector<std::vector<int>> blue_circles;  // size 2n
  std::vector<std::vector<int>> red_circles;   // size 2m+1
};

// Dot/circle extraction with the class rule plus fixed-extension virtual
// particles; all ParticleConfig invariants asserted.
ParticleConfig particles(const Tiling& t);

// Dots of a single-diamond tiling per black anti-diagonal e (actual cells
// only); used by the sampler statistics and the one-Aztec trace oracle.
std::map<int, std::vector<int>> single_diamond_blue_dots(const Tiling& t);

enum class HeightKind { h, h_tilde };

struct HeightField {
  HeightKind kind;
  int n = 0, m = 0;
  // values[ell][k] = height on axis ell (0..2n+1) at the half-integer level
  // Y = n+m+1/2-k, k = 0..2n+2m+1 (top edge first, bottom edge last).
  std::vector<std::vector<int>> values;
  int top_value() const { return values.front().front(); }
  int bottom_value() const { return values.front().back(); }
};

// Heights in the level-line gauge: h counts outlier paths above a point
// (0 on the top edge, 2n on the bottom); h~ counts inlier paths below
// (0 bottom, 2m+1 top). `integration_order` 0 counts from above, 1 from
// below; the two must agree (throws numerics_error on closure failure).
HeightField height_field(const Tiling& t, HeightKind kind,
                         int integration_order = 0);

// Level lines of a height field: 2n outlier or 2m+1 inlier paths, each a
// vector over axes ell = 2..2n (dots on even axes for h) giving positions;
// returned top path first, pairwise disjoint.
std::vector<std::vector<int>> level_lines(const Tiling& t, HeightKind kind);

// Weighted probability that all listed positions carry a blue dot on even
// line Y_{2r}, and companion gap statistics, accumulated by streaming
// enumeration.
struct EnumerationStats {
  double z = 0.0;  // partition function
  long count = 0;
};

double empirical_correlation(const Region& region, double a, int r,
                             const std::vector<int>& positions,
                             long max_tilings = 100000000L);

// P(no blue dot on line Y_{2r_i} within [lo_i, hi_i] for all i).
double empirical_gap(const Region& region, double a,
                     const std::vector<int>& rs,
                     const std::vector<std::pair<int, int>>& windows,
                     long max_tilings = 100000000L);

}  // namespace aztac
