#include "aztac/sampler.hpp"

#include <algorithm>
#include <cmath>

namespace aztac {

void ChainConfig::validate() const {
  if (samples <= 0 || chains <= 0 || burnin_sweeps < 0 || thinning < 0)
    throw std::invalid_argument("chain configuration values must be positive");
}

std::vector<FlipMove> list_flips(const Tiling& t) {
  const Region& rg = t.region();
  const auto& cells = rg.cells();
  std::vector<FlipMove> out;
  for (int ci = 0; ci < static_cast<int>(cells.size()); ++ci) {
    const Cell c = cells[ci];
    int e = rg.index_of({c.i + 1, c.j});
    int n0 = rg.index_of({c.i, c.j + 1});
    int ne = rg.index_of({c.i + 1, c.j + 1});
    if (e < 0 || n0 < 0 || ne < 0) continue;
    if (t.partner(ci) == e && t.partner(n0) == ne)
      out.push_back({ci, true});  // two horizontals -> verticals
    else if (t.partner(ci) == n0 && t.partner(e) == ne)
      out.push_back({ci, false});
  }
  return out;
}

Tiling apply_flip(const Tiling& t, const FlipMove& mv) {
  const Region& rg = t.region();
  const auto& cells = rg.cells();
  std::vector<int> partner(cells.size());
  for (size_t i = 0; i < cells.size(); ++i) partner[i] = t.partner(static_cast<int>(i));
  const Cell c = cells[mv.cell_idx];
  int sw = mv.cell_idx;
  int se = rg.index_of({c.i + 1, c.j});
  int nw = rg.index_of({c.i, c.j + 1});
  int ne = rg.index_of({c.i + 1, c.j + 1});
  if (mv.to_vertical) {
    partner[sw] = nw;
    partner[nw] = sw;
    partner[se] = ne;
    partner[ne] = se;
  } else {
    partner[sw] = se;
    partner[se] = sw;
    partner[nw] = ne;
    partner[ne] = nw;
  }
  return Tiling(&rg, partner);
}

Tiling mcmc_step(const Tiling& t, double a, std::mt19937_64& rng) {
  // Propose by uniform anchor cell so the proposal is symmetric across
  // states with different flip counts; a non-anchoring cell is a no-op.
  const Region& rg = t.region();
  const auto& cells = rg.cells();
  int ci = static_cast<int>(uniform01(rng) * cells.size());
  ci = std::min(ci, static_cast<int>(cells.size()) - 1);
  const Cell c = cells[ci];
  int e = rg.index_of({c.i + 1, c.j});
  int n0 = rg.index_of({c.i, c.j + 1});
  int ne = rg.index_of({c.i + 1, c.j + 1});
  if (e < 0 || n0 < 0 || ne < 0) return t;
  bool horiz_pair = (t.partner(ci) == e && t.partner(n0) == ne);
  bool vert_pair = (t.partner(ci) == n0 && t.partner(e) == ne);
  if (!horiz_pair && !vert_pair) return t;
  double accept = horiz_pair ? a * a : 1.0;  // delta #vertical is +2 or -2
  if (accept < 1.0 && uniform01(rng) >= accept) return t;
  return apply_flip(t, {ci, horiz_pair});
}

namespace {

// dense grid holding the running shuffle state; -1 empty, otherwise the
// linear index of the partner cell
struct Grid {
  int n_max;
  int side;
  std::vector<int> partner;
  explicit Grid(int n) : n_max(n + 1), side(2 * (n + 1)), partner(side * side, -1) {}
  int idx(int i, int j) const { return (i + n_max) * side + (j + n_max); }
  bool inside_idx(int i, int j) const {
    return i >= -n_max && i < n_max && j >= -n_max && j < n_max;
  }
};

bool in_diamond(int k, int i, int j) {
  return std::abs(i + 0.5) + std::abs(j + 0.5) <= k + 1e-9;
}

}  // namespace

Tiling shuffle_single_aztec(const Region& region, double a,
                            std::mt19937_64& rng) {
  if (region.kind() != Region::Kind::SingleDiamond)
    throw std::invalid_argument("shuffle expects a single-diamond region");
  if (!(a > 0.0 && a <= 1.0))
    throw std::invalid_argument("shuffle weight must lie in (0, 1]");
  const int n = region.shape().n;
  Grid g(n);
  const double p_vert = a * a / (1.0 + a * a);

  auto fill_empty_blocks = [&](int k) {
    for (int i = -k; i < k; ++i)
      for (int j = -k; j < k; ++j) {
        if (!in_diamond(k, i, j)) continue;
        if (g.partner[g.idx(i, j)] != -1) continue;
        // lowest-left empty cell anchors its 2x2 block
        if (g.partner[g.idx(i + 1, j)] != -1 || g.partner[g.idx(i, j + 1)] != -1 ||
            g.partner[g.idx(i + 1, j + 1)] != -1)
          throw numerics_error("shuffle: empty cells do not form 2x2 blocks");
        if (uniform01(rng) < p_vert) {
          g.partner[g.idx(i, j)] = g.idx(i, j + 1);
          g.partner[g.idx(i, j + 1)] = g.idx(i, j);
          g.partner[g.idx(i + 1, j)] = g.idx(i + 1, j + 1);
          g.partner[g.idx(i + 1, j + 1)] = g.idx(i + 1, j);
        } else {
          g.partner[g.idx(i, j)] = g.idx(i + 1, j);
          g.partner[g.idx(i + 1, j)] = g.idx(i, j);
          g.partner[g.idx(i, j + 1)] = g.idx(i + 1, j + 1);
          g.partner[g.idx(i + 1, j + 1)] = g.idx(i, j + 1);
        }
      }
  };

  fill_empty_blocks(1);
  for (int k = 1; k < n; ++k) {
    // collect dominoes as (anchor cell, horizontal?) with motion directions
    struct Dm {
      int i, j;
      bool horiz;
      int di, dj;
    };
    std::vector<Dm> doms;
    for (int i = -k; i < k; ++i)
      for (int j = -k; j < k; ++j) {
        int p = g.partner[g.idx(i, j)];
        if (p == -1) continue;
        if (p == g.idx(i + 1, j)) {  // horizontal, this is the left cell
          bool up = ((i + j + k) % 2 + 2) % 2 == 0;
          doms.push_back({i, j, true, 0, up ? 1 : -1});
        } else if (p == g.idx(i, j + 1)) {  // vertical, bottom cell
          bool right = ((i + j + k) % 2 + 2) % 2 == 0;
          doms.push_back({i, j, false, right ? 1 : -1, 0});
        }
      }
    // destruction: facing pairs that would swap annihilate
    std::vector<char> dead(doms.size(), 0);
    std::map<std::pair<int, int>, int> by_anchor;
    for (size_t q = 0; q < doms.size(); ++q)
      by_anchor[{doms[q].i, doms[q].j}] = static_cast<int>(q);
    for (size_t q = 0; q < doms.size(); ++q) {
      const Dm& d = doms[q];
      if (dead[q]) continue;
      if (d.horiz && d.dj == 1) {
        auto it = by_anchor.find({d.i, d.j + 1});
        if (it != by_anchor.end()) {
          const Dm& o = doms[it->second];
          if (o.horiz && o.dj == -1) dead[q] = dead[it->second] = 1;
        }
      } else if (!d.horiz && d.di == 1) {
        auto it = by_anchor.find({d.i + 1, d.j});
        if (it != by_anchor.end()) {
          const Dm& o = doms[it->second];
          if (!o.horiz && o.di == -1) dead[q] = dead[it->second] = 1;
        }
      }
    }
    // slide survivors into the order-(k+1) diamond
    std::fill(g.partner.begin(), g.partner.end(), -1);
    for (size_t q = 0; q < doms.size(); ++q) {
      if (dead[q]) continue;
      const Dm& d = doms[q];
      int i = d.i + d.di, j = d.j + d.dj;
      if (!in_diamond(k + 1, i, j))
        throw numerics_error("shuffle: domino slid outside the diamond");
      if (d.horiz) {
        g.partner[g.idx(i, j)] = g.idx(i + 1, j);
        g.partner[g.idx(i + 1, j)] = g.idx(i, j);
      } else {
        g.partner[g.idx(i, j)] = g.idx(i, j + 1);
        g.partner[g.idx(i, j + 1)] = g.idx(i, j);
      }
    }
    fill_empty_blocks(k + 1);
  }

  // convert to a Tiling on the region
  const auto& cells = region.cells();
  std::vector<int> partner(cells.size(), -1);
  for (size_t ci = 0; ci < cells.size(); ++ci) {
    int p = g.partner[g.idx(cells[ci].i, cells[ci].j)];
    if (p < 0) throw numerics_error("shuffle left an uncovered cell");
    int pi = p / g.side - g.n_max, pj = p % g.side - g.n_max;
    int pidx = region.index_of({pi, pj});
    if (pidx < 0) throw numerics_error("shuffle produced an out-of-region domino");
    partner[ci] = pidx;
  }
  return Tiling(&region, partner);
}

Estimate estimate(const std::vector<double>& values) {
  Estimate e;
  e.samples = static_cast<long>(values.size());
  if (values.empty()) return e;
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= values.size();
  e.mean = mean;
  int nb = std::min<long>(16, e.samples);
  if (nb < 2) return e;
  long per = e.samples / nb;
  std::vector<double> bm;
  for (int b = 0; b < nb; ++b) {
    double acc = 0.0;
    for (long q = b * per; q < (b + 1) * per; ++q) acc += values[q];
    bm.push_back(acc / per);
  }
  double mb = 0.0;
  for (double v : bm) mb += v;
  mb /= bm.size();
  double var = 0.0;
  for (double v : bm) var += (v - mb) * (v - mb);
  var /= (bm.size() - 1);
  e.std_error = std::sqrt(var / bm.size());
  return e;
}

Estimate run_mcmc(const Region& region, double a, const ChainConfig& cfg,
                  const std::function<double(const Tiling&)>& observable) {
  cfg.validate();
  const int n = region.shape().n;
  long burnin = cfg.burnin_sweeps > 0
                    ? cfg.burnin_sweeps
                    : 20L * static_cast<long>(n) * n * n;
  long thin = cfg.thinning > 0 ? cfg.thinning : region.cell_count();
  std::vector<double> values;
  values.reserve(cfg.samples * cfg.chains);
  for (int chain = 0; chain < cfg.chains; ++chain) {
    std::mt19937_64 rng(cfg.master_seed + 0x9E3779B97F4A7C15ull * (chain + 1));
    // deterministic initial state: first tiling in enumeration order is the
    // greedy horizontal-first matching
    std::vector<int> partner(region.cell_count(), -1);
    const auto& cells = region.cells();
    for (int ci = 0; ci < region.cell_count(); ++ci) {
      if (partner[ci] != -1) continue;
      int h = region.index_of({cells[ci].i + 1, cells[ci].j});
      int v = region.index_of({cells[ci].i, cells[ci].j + 1});
      int p = (h >= 0 && partner[h] == -1) ? h : v;
      if (p < 0 || partner[p] != -1)
        throw numerics_error("greedy initial tiling failed");
      partner[ci] = p;
      partner[p] = ci;
    }
    Tiling t(&region, partner);
    for (long q = 0; q < burnin; ++q) t = mcmc_step(t, a, rng);
    for (long s = 0; s < cfg.samples; ++s) {
      for (long q = 0; q < thin; ++q) t = mcmc_step(t, a, rng);
      values.push_back(observable(t));
    }
  }
  return estimate(values);
}

}  // namespace aztac
