#include "palis/synth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <random>

#include "palis/error.hpp"

namespace palis {

std::string_view to_string(Scene s) {
  switch (s) {
    case Scene::Grid: return "grid";
    case Scene::Plus: return "plus";
    case Scene::Overpass: return "overpass";
    case Scene::Manhattan: return "manhattan";
  }
  return "unknown";
}

std::optional<Scene> parse_scene(std::string_view s) {
  for (Scene c : {Scene::Grid, Scene::Plus, Scene::Overpass, Scene::Manhattan}) {
    if (s == to_string(c)) return c;
  }
  return std::nullopt;
}

void SynthParams::validate() const {
  if (patch_size < 4) throw InvariantError("synthetic scenes need a patch size of at least 4");
  if (width % patch_size != 0 || height % patch_size != 0) {
    throw InvariantError("patch size must divide the scene dimensions");
  }
  if (width < 8 * patch_size || height < 8 * patch_size) {
    throw InvariantError("synthetic scenes need at least 8 x 8 patches");
  }
}

namespace {

constexpr double kBorderMargin = 2.0;

// Uniform doubles from raw 64-bit draws; identical on every standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}
  double uniform(double lo, double hi) {
    const double u = static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    return lo + (hi - lo) * u;
  }
  int integer(int lo, int hi) {  // inclusive
    return lo + static_cast<int>(gen_() % static_cast<std::uint64_t>(hi - lo + 1));
  }
  bool chance(double p) { return uniform(0.0, 1.0) < p; }

 private:
  std::mt19937_64 gen_;
};

double quantize(double v) { return std::round(v * 1e6) / 1e6; }
Point quantize(Point p) { return {quantize(p.x), quantize(p.y)}; }

Point unit(double degrees) {
  const double r = degrees * std::numbers::pi / 180.0;
  return {std::cos(r), std::sin(r)};
}

// Where the ray from `c` along `d` leaves the box inset by kBorderMargin.
Point exit_point(Point c, Point d, const SynthParams& params) {
  const double lo = kBorderMargin;
  const double hx = params.width - kBorderMargin;
  const double hy = params.height - kBorderMargin;
  double t = std::numeric_limits<double>::infinity();
  if (d.x > 0) t = std::min(t, (hx - c.x) / d.x);
  if (d.x < 0) t = std::min(t, (lo - c.x) / d.x);
  if (d.y > 0) t = std::min(t, (hy - c.y) / d.y);
  if (d.y < 0) t = std::min(t, (lo - c.y) / d.y);
  return c + t * d;
}

// Axis-aligned street lattice. Streets end kBorderMargin px inside the image.
RoadGraph lattice(const std::vector<double>& xs, const std::vector<double>& ys, const SynthParams& params) {
  const double x_lo = kBorderMargin;
  const double x_hi = params.width - kBorderMargin;
  const double y_lo = kBorderMargin;
  const double y_hi = params.height - kBorderMargin;
  RoadGraph g;
  std::map<std::pair<double, double>, std::uint32_t> ids;
  auto vertex = [&](double x, double y) {
    const Point p = quantize(Point{x, y});
    const auto [it, fresh] = ids.try_emplace({p.x, p.y}, 0);
    if (fresh) it->second = g.add_vertex(p);
    return it->second;
  };
  for (double x : xs) {
    std::uint32_t prev = vertex(x, y_lo);
    for (double y : ys) {
      const std::uint32_t v = vertex(x, y);
      g.add_edge(prev, v);
      prev = v;
    }
    g.add_edge(prev, vertex(x, y_hi));
  }
  for (double y : ys) {
    std::uint32_t prev = vertex(x_lo, y);
    for (double x : xs) {
      const std::uint32_t v = vertex(x, y);
      g.add_edge(prev, v);
      prev = v;
    }
    g.add_edge(prev, vertex(x_hi, y));
  }
  return g;
}

// Street positions: cells at least 4 apart, offset [2, p - 2] inside the cell.
std::vector<double> street_positions(Rng& rng, int cells, int p) {
  std::vector<double> out;
  for (int c = rng.integer(1, 2); c < cells - 1; c += rng.integer(4, 5)) {
    out.push_back(c * p + rng.uniform(2.0, p - 2.0));
  }
  return out;
}

RoadGraph drop_blocks(const RoadGraph& g, Rng& rng, double p_drop) {
  std::vector<int> deg = g.degrees();
  RoadGraph out;
  out.vertices = g.vertices;
  for (const Edge& e : g.edges) {
    // Only street pieces between two full crossings; the crossings become
    // T-junctions and no corner or dead end appears.
    if (deg[e.u] == 4 && deg[e.v] == 4 && rng.chance(p_drop)) {
      --deg[e.u];
      --deg[e.v];
      continue;
    }
    out.edges.push_back(e);
  }
  return out;
}

RoadGraph grid_scene(std::uint64_t seed, const SynthParams& params) {
  const int p = params.patch_size;
  const int phase = static_cast<int>(seed % 4);
  auto positions = [&](int cells) {
    std::vector<double> out;
    for (int c = phase + 1; c < cells - 1; c += 4) out.push_back(c * p + 0.5 * p);
    return out;
  };
  return lattice(positions(params.width / p), positions(params.height / p), params);
}

RoadGraph plus_scene(Rng& rng, const SynthParams& params) {
  const int p = params.patch_size;
  const int row = params.height / p / 2;
  const int col = params.width / p / 2;
  const double margin = 0.3 * p;
  const Point center = quantize(Point{col * p + rng.uniform(margin, p - margin), row * p + rng.uniform(margin, p - margin)});
  RoadGraph g;
  const std::uint32_t hub = g.add_vertex(center);
  for (int k = 0; k < 4; ++k) {
    const Point d = unit(90.0 * k + rng.uniform(-8.0, 8.0));
    g.add_edge(hub, g.add_vertex(quantize(exit_point(center, d, params))));
  }
  return g;
}

RoadGraph overpass_scene(Rng& rng, const SynthParams& params) {
  const int p = params.patch_size;
  const int row = params.height / p / 2 + rng.integer(-1, 1);
  const int col = params.width / p / 2 + rng.integer(-1, 1);
  const Point cell_center{(col + 0.5) * p, (row + 0.5) * p};
  const Point crossing = cell_center + Point{rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
  const double first = rng.uniform(-15.0, 15.0);
  const double second = first + (rng.chance(0.5) ? 1.0 : -1.0) * rng.uniform(70.0, 90.0);
  RoadGraph g;
  for (double angle : {first, second}) {
    const Point d = unit(angle);
    const std::uint32_t a = g.add_vertex(quantize(exit_point(crossing, -1.0 * d, params)));
    const std::uint32_t b = g.add_vertex(quantize(exit_point(crossing, d, params)));
    g.add_edge(a, b);
  }
  return g;
}

RoadGraph manhattan_scene(Rng& rng, const SynthParams& params) {
  const int p = params.patch_size;
  const std::vector<double> xs = street_positions(rng, params.width / p, p);
  const std::vector<double> ys = street_positions(rng, params.height / p, p);
  return drop_blocks(lattice(xs, ys, params), rng, 0.25);
}

}  // namespace

GraphDocument synth_scene(Scene scene, std::uint64_t seed, const SynthParams& params) {
  params.validate();
  Rng rng(seed);
  GraphDocument doc{params.width, params.height, {}};
  switch (scene) {
    case Scene::Grid: doc.graph = grid_scene(seed, params); break;
    case Scene::Plus: doc.graph = plus_scene(rng, params); break;
    case Scene::Overpass: doc.graph = overpass_scene(rng, params); break;
    case Scene::Manhattan: doc.graph = manhattan_scene(rng, params); break;
  }
  doc.graph.validate();
  return doc;
}

}  // namespace palis
