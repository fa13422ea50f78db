#include "aztac/geometry.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>

namespace aztac {

void ModelShape::validate() const {
  if (!(a > 0.0 && a < 1.0))
    throw invalid_shape("weight a must lie in (0,1)");
  if (n < 2 || n % 2 != 0)
    throw invalid_shape("diamond order n must be even and >= 2");
  if (m < 0 || 2 * m > n - 2)
    throw invalid_shape("inlier parameter m must satisfy 0 <= m <= (n-2)/2");
}

char compass_letter(Compass c) {
  switch (c) {
    case Compass::N: return 'N';
    case Compass::S: return 'S';
    case Compass::E: return 'E';
    case Compass::W: return 'W';
  }
  return '?';
}

namespace {

std::vector<Cell> aztec_cells(int n, int di, int dj) {
  std::vector<Cell> out;
  for (int i = -n; i < n; ++i)
    for (int j = -n; j < n; ++j)
      if (std::abs(i + 0.5) + std::abs(j + 0.5) <= n + 1e-9)
        out.push_back({i + di, j + dj});
  return out;
}

}  // namespace

Region Region::double_diamond(const ModelShape& shape) {
  shape.validate();
  Region rg;
  rg.kind_ = Kind::DoubleDiamond;
  rg.shape_ = shape;
  std::set<Cell> cs;
  for (const Cell& c : aztec_cells(shape.n, 0, 0)) cs.insert(c);
  for (const Cell& c : aztec_cells(shape.n, 2 * shape.m, -(2 * shape.m + 1)))
    cs.insert(c);
  rg.cells_.assign(cs.begin(), cs.end());
  rg.build_lines();
  rg.assert_invariants();
  return rg;
}

Region Region::single_diamond(int n) {
  if (n < 1) throw invalid_shape("single diamond order must be >= 1");
  Region rg;
  rg.kind_ = Kind::SingleDiamond;
  rg.shape_ = ModelShape{0.5, std::max(2, n + (n % 2)), 0};
  rg.shape_.n = n;  // bypass evenness; single diamonds allow any order
  rg.cells_ = aztec_cells(n, 0, 0);
  std::sort(rg.cells_.begin(), rg.cells_.end());
  return rg;
}

bool Region::contains(const Cell& c) const { return index_of(c) >= 0; }

int Region::index_of(const Cell& c) const {
  auto it = std::lower_bound(cells_.begin(), cells_.end(), c);
  if (it != cells_.end() && *it == c)
    return static_cast<int>(it - cells_.begin());
  return -1;
}

const std::vector<Cell>& Region::line_cells(int ell) const {
  static const std::vector<Cell> empty;
  if (ell < 0 || ell >= static_cast<int>(lines_.size())) return empty;
  return lines_[ell];
}

void Region::build_lines() {
  lines_.assign(2 * shape_.n + 2, {});
  for (const Cell& c : cells_) {
    int ell = line_of(c);
    if (ell >= 0 && ell < static_cast<int>(lines_.size()))
      lines_[ell].push_back(c);
  }
  for (auto& ln : lines_)
    std::sort(ln.begin(), ln.end(),
              [](const Cell& a, const Cell& b) { return a.j > b.j; });
}

std::pair<std::vector<int>, std::vector<int>> Region::virtual_sites(
    int ell) const {
  const int n = shape_.n, m = shape_.m;
  std::vector<int> top, bottom;
  const auto& ln = line_cells(ell);
  if (ln.empty()) return {top, bottom};
  int y_hi = y_of(ln.front());
  int y_lo = y_of(ln.back());
  for (int y = y_hi + 1; y <= n + m; ++y) top.push_back(y);
  for (int y = -n - m; y < y_lo; ++y) bottom.push_back(y);
  return {top, bottom};
}

void Region::assert_invariants() const {
  const int n = shape_.n, m = shape_.m;
  // per-line site counts: actual cells contiguous in Y, padded by the fixed
  // extension to exactly 2n+2m+1 sites in [-n-m, n+m]; the boundary axes
  // ell = 0 and 2n+1 carry the n deterministic cells plus conventions
  for (int ell = 0; ell <= 2 * n + 1; ++ell) {
    const auto& ln = lines_[ell];
    if (ln.empty()) throw invalid_shape("empty oblique line");
    for (size_t k = 1; k < ln.size(); ++k)
      if (y_of(ln[k - 1]) - y_of(ln[k]) != 1)
        throw invalid_shape("non-contiguous oblique line");
    if (y_of(ln.front()) > n + m || y_of(ln.back()) < -n - m)
      throw invalid_shape("oblique line exceeds the site window");
    if (ell == 0) {
      if (static_cast<int>(ln.size()) != n || y_of(ln.front()) != -m - 1)
        throw invalid_shape("initial axis does not carry n cells below -m");
    } else if (ell == 2 * n + 1) {
      if (static_cast<int>(ln.size()) != n || y_of(ln.back()) != m + 1)
        throw invalid_shape("final axis does not carry n cells above m");
    } else {
      auto [top, bottom] = virtual_sites(ell);
      int total = static_cast<int>(ln.size() + top.size() + bottom.size());
      if (total != 2 * n + 2 * m + 1)
        throw invalid_shape("oblique line does not carry 2n+2m+1 sites");
    }
  }
  // exactly 2m+1 exposed white squares on the lower-left boundary, at
  // Y = -m..m (the inlier start squares)
  // a row's leftmost cell is the one with no left neighbor; the union's
  // lower-left staircase exposes exactly the 2m+1 white inlier squares
  std::vector<int> exposed;
  for (const Cell& c : cells_) {
    if (cell_black(c)) continue;
    if (!contains({c.i - 1, c.j})) exposed.push_back(y_of(c));
  }
  std::sort(exposed.begin(), exposed.end());
  std::vector<int> expect;
  for (int y = -m; y <= m; ++y) expect.push_back(y);
  if (exposed != expect)
    throw invalid_shape("lower-left boundary white squares are not at Y=-m..m");
}

Tiling::Tiling(const Region* region, std::vector<int> partner)
    : region_(region), partner_(std::move(partner)) {
  const auto& cells = region_->cells();
  if (partner_.size() != cells.size())
    throw std::invalid_argument("partner vector size mismatch");
  for (size_t i = 0; i < partner_.size(); ++i) {
    int p = partner_[i];
    if (p < 0 || p >= static_cast<int>(cells.size()) ||
        partner_[p] != static_cast<int>(i) || p == static_cast<int>(i))
      throw std::invalid_argument("invalid matching");
    int di = std::abs(cells[i].i - cells[p].i);
    int dj = std::abs(cells[i].j - cells[p].j);
    if (di + dj != 1) throw std::invalid_argument("non-adjacent matching");
    if (di == 0 && cells[i].j < cells[p].j) ++vertical_count_;
  }
}

Compass Tiling::compass_at(int cell_idx) const {
  const auto& cells = region_->cells();
  const Cell& c = cells[cell_idx];
  const Cell& p = cells[partner_[cell_idx]];
  if (c.j == p.j) {  // horizontal
    const Cell& left = (c.i < p.i) ? c : p;
    return cell_black(left) ? Compass::S : Compass::N;
  }
  const Cell& bottom = (c.j < p.j) ? c : p;
  return cell_black(bottom) ? Compass::W : Compass::E;
}

bool Tiling::blue_class_at(int cell_idx) const {
  Compass t = compass_at(cell_idx);
  return t == Compass::S || t == Compass::W;
}

std::string Tiling::serialize() const {
  std::ostringstream os;
  const auto& cells = region_->cells();
  os << "# ";
  os << (region_->kind() == Region::Kind::DoubleDiamond ? "double" : "single");
  os << " n=" << region_->shape().n << " m=" << region_->shape().m << "\n";
  for (size_t i = 0; i < cells.size(); ++i) {
    int p = partner_[i];
    if (p < static_cast<int>(i)) continue;
    const Cell& c = cells[i];
    char orient = (cells[p].j == c.j) ? 'H' : 'V';
    os << c.i << ' ' << c.j << ' ' << orient << ' '
       << compass_letter(compass_at(static_cast<int>(i))) << "\n";
  }
  return os.str();
}

Tiling Tiling::deserialize(const Region* region, const std::string& text) {
  std::istringstream is(text);
  std::string line;
  std::vector<int> partner(region->cells().size(), -1);
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    int i, j;
    char orient, compass;
    if (!(ls >> i >> j >> orient >> compass))
      throw std::invalid_argument("bad tiling line: " + line);
    Cell c{i, j};
    Cell p = (orient == 'H') ? Cell{i + 1, j} : Cell{i, j + 1};
    int ci = region->index_of(c), pi = region->index_of(p);
    if (ci < 0 || pi < 0)
      throw std::invalid_argument("tiling cell outside region");
    if (partner[ci] != -1 || partner[pi] != -1)
      throw std::invalid_argument("overlapping dominoes in tiling file");
    partner[ci] = pi;
    partner[pi] = ci;
  }
  for (int p : partner)
    if (p < 0) throw std::invalid_argument("tiling does not cover the region");
  return Tiling(region, partner);
}

double tiling_weight(const Tiling& t, double a) {
  return std::pow(a, t.vertical_count());
}

long enumerate_tilings(const Region& region,
                       const std::function<void(const Tiling&)>& visit,
                       long max_tilings, bool reversed_order) {
  const auto& cells = region.cells();
  const int nc = static_cast<int>(cells.size());
  std::vector<int> partner(nc, -1);
  // neighbor candidates in fixed order: horizontal (i+1,j) then vertical (i,j+1)
  std::vector<std::array<int, 2>> cand(nc, {-1, -1});
  for (int i = 0; i < nc; ++i) {
    cand[i][0] = region.index_of({cells[i].i + 1, cells[i].j});
    cand[i][1] = region.index_of({cells[i].i, cells[i].j + 1});
    if (reversed_order) std::swap(cand[i][0], cand[i][1]);
  }
  long count = 0;
  std::function<void(int)> rec = [&](int from) {
    int c = from;
    while (c < nc && partner[c] != -1) ++c;
    if (c == nc) {
      if (++count > max_tilings)
        throw budget_exceeded("enumeration exceeded tiling budget");
      visit(Tiling(&region, partner));
      return;
    }
    for (int k = 0; k < 2; ++k) {
      int p = cand[c][k];
      if (p >= 0 && partner[p] == -1) {
        partner[c] = p;
        partner[p] = c;
        rec(c + 1);
        partner[c] = -1;
        partner[p] = -1;
      }
    }
  };
  rec(0);
  return count;
}

ParticleConfig particles(const Tiling& t) {
  const Region& rg = t.region();
  if (rg.kind() != Region::Kind::DoubleDiamond)
    throw std::invalid_argument("particles() expects a double diamond");
  const int n = rg.shape().n, m = rg.shape().m;
  ParticleConfig pc;
  pc.blue_dots.assign(n + 1, {});
  pc.red_dots.assign(n + 1, {});
  pc.blue_circles.assign(n + 2, {});
  pc.red_circles.assign(n + 2, {});

  for (int ell = 0; ell <= 2 * n + 1; ++ell) {
    bool even = (ell % 2 == 0);
    int r = even ? ell / 2 : (ell + 1) / 2;
    auto& blue = even ? pc.blue_dots[r] : pc.blue_circles[r];
    auto& red = even ? pc.red_dots[r] : pc.red_circles[r];
    bool boundary = (ell == 0 || ell == 2 * n + 1);
    for (const Cell& c : rg.line_cells(ell)) {
      int y = rg.y_of(c);
      if (t.blue_class_at(rg.index_of(c)))
        blue.push_back(y);
      else if (boundary)
        throw numerics_error("boundary axis carries a red particle");
      else
        red.push_back(y);
    }
    if (boundary) {
      // fixed initial/final inlier particles at Y = -m..m, and the extension
      // fills the remaining window deterministically
      for (int y = -m; y <= m; ++y) red.push_back(y);
      if (ell == 0)
        for (int y = m + 1; y <= n + m; ++y) blue.push_back(y);
      else
        for (int y = -n - m; y <= -m - 1; ++y) blue.push_back(y);
    } else {
      auto [top, bottom] = rg.virtual_sites(ell);
      blue.insert(blue.end(), bottom.begin(), bottom.end());
      blue.insert(blue.end(), top.begin(), top.end());
    }
    std::sort(blue.begin(), blue.end());
    std::sort(red.begin(), red.end());
    if (static_cast<int>(blue.size()) != 2 * n ||
        static_cast<int>(red.size()) != 2 * m + 1)
      throw numerics_error("particle counts violated on an oblique line");
    // complementarity: the two sets partition the 2n+2m+1 sites
    std::vector<int> all;
    all.reserve(blue.size() + red.size());
    std::merge(blue.begin(), blue.end(), red.begin(), red.end(),
               std::back_inserter(all));
    for (size_t k = 0; k < all.size(); ++k)
      if (all[k] != -(n + m) + static_cast<int>(k))
        throw numerics_error("dot/gap complementarity violated");
  }
  return pc;
}

std::map<int, std::vector<int>> single_diamond_blue_dots(const Tiling& t) {
  const Region& rg = t.region();
  std::map<int, std::vector<int>> out;
  const auto& cells = rg.cells();
  for (size_t i = 0; i < cells.size(); ++i) {
    const Cell& c = cells[i];
    if (!cell_black(c)) continue;
    if (t.blue_class_at(static_cast<int>(i)))
      out[c.i + c.j].push_back(c.j);
  }
  for (auto& [e, v] : out) std::sort(v.begin(), v.end());
  return out;
}

HeightField height_field(const Tiling& t, HeightKind kind,
                         int integration_order) {
  const Region& rg = t.region();
  const int n = rg.shape().n, m = rg.shape().m;
  ParticleConfig pc = particles(t);
  HeightField hf;
  hf.kind = kind;
  hf.n = n;
  hf.m = m;
  const int levels = 2 * n + 2 * m + 2;  // half-integer levels incl. edges
  hf.values.assign(2 * n + 2, std::vector<int>(levels, 0));
  for (int ell = 0; ell <= 2 * n + 1; ++ell) {
    bool even = (ell % 2 == 0);
    int r = even ? ell / 2 : (ell + 1) / 2;
    const auto& pos = (kind == HeightKind::h)
                          ? (even ? pc.blue_dots[r] : pc.blue_circles[r])
                          : (even ? pc.red_dots[r] : pc.red_circles[r]);
    int total = static_cast<int>(pos.size());
    for (int k = 0; k < levels; ++k) {
      int level_y2 = 2 * (n + m) + 1 - 2 * k;  // 2*Y of the half-level
      int above = 0, below = 0;
      for (int p : pos) (2 * p > level_y2 ? above : below)++;
      if (above + below != total)
        throw numerics_error("height increments fail to close");
      int v = (integration_order == 0) ? above : total - below;
      // h counts paths above; h~ counts paths below
      hf.values[ell][k] = (kind == HeightKind::h) ? v : total - v;
    }
  }
  return hf;
}

std::vector<std::vector<int>> level_lines(const Tiling& t, HeightKind kind) {
  const Region& rg = t.region();
  const int n = rg.shape().n;
  ParticleConfig pc = particles(t);
  int n_paths = (kind == HeightKind::h) ? 2 * n : 2 * rg.shape().m + 1;
  std::vector<std::vector<int>> paths(n_paths);
  for (int ell = 0; ell <= 2 * n + 1; ++ell) {
    bool even = (ell % 2 == 0);
    int r = even ? ell / 2 : (ell + 1) / 2;
    const auto& pos = (kind == HeightKind::h)
                          ? (even ? pc.blue_dots[r] : pc.blue_circles[r])
                          : (even ? pc.red_dots[r] : pc.red_circles[r]);
    // k-th path from the top takes the k-th largest position (non-crossing)
    for (int k = 0; k < n_paths; ++k)
      paths[k].push_back(pos[pos.size() - 1 - k]);
  }
  return paths;
}

namespace {

double enumerate_weighted(const Region& region, double a,
                          const std::function<double(const Tiling&)>& f,
                          long max_tilings) {
  double z = 0.0, acc = 0.0;
  enumerate_tilings(
      region,
      [&](const Tiling& t) {
        double w = tiling_weight(t, a);
        z += w;
        acc += w * f(t);
      },
      max_tilings);
  return acc / z;
}

}  // namespace

double empirical_correlation(const Region& region, double a, int r,
                             const std::vector<int>& positions,
                             long max_tilings) {
  return enumerate_weighted(
      region, a,
      [&](const Tiling& t) {
        ParticleConfig pc = particles(t);
        const auto& dots = pc.blue_dots[r];
        for (int p : positions)
          if (!std::binary_search(dots.begin(), dots.end(), p)) return 0.0;
        return 1.0;
      },
      max_tilings);
}

double empirical_gap(const Region& region, double a,
                     const std::vector<int>& rs,
                     const std::vector<std::pair<int, int>>& windows,
                     long max_tilings) {
  return enumerate_weighted(
      region, a,
      [&](const Tiling& t) {
        ParticleConfig pc = particles(t);
        for (size_t q = 0; q < rs.size(); ++q) {
          const auto& dots = pc.blue_dots[rs[q]];
          for (int p = windows[q].first; p <= windows[q].second; ++p)
            if (std::binary_search(dots.begin(), dots.end(), p)) return 0.0;
        }
        return 1.0;
      },
      max_tilings);
}

}  // namespace aztac
