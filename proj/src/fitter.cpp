#include "palis/fitter.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>

#include "palis/error.hpp"

namespace palis {

void FitConfig::validate() const {
  if (!(learning_rate > 0.0)) throw InvariantError("learning_rate must be positive");
  if (max_iters < 0) throw InvariantError("max_iters must be non-negative");
  if (!(tol >= 0.0)) throw InvariantError("tol must be non-negative");
  if (!(momentum >= 0.0 && momentum < 1.0)) throw InvariantError("momentum must lie in [0, 1)");
  raster.validate();
}

namespace {

struct CellRef {
  int row;
  int col;
};

std::vector<CellRef> i_cell_refs(const PatchGrid& grid) {
  std::vector<CellRef> refs;
  for (std::size_t idx : grid.i_cells()) {
    refs.push_back({static_cast<int>(idx) / grid.cols(), static_cast<int>(idx) % grid.cols()});
  }
  return refs;
}

LineSegment clamped(const LineSegment& l, const PatchRect& rect) { return {rect.clamp(l.a), rect.clamp(l.b)}; }

double masked_loss(const PatchGrid& grid, const SoftMask& target, const RasterParams& params) {
  return dice_loss(compose_soft_mask(grid, params), target);
}

void attach_reference(FitReport& report, const PatchGrid& fitted, const PatchGrid* reference) {
  if (!reference) return;
  report.mean_endpoint_error = mean_endpoint_error(fitted, *reference, &report.cell_endpoint_error);
}

}  // namespace

FitResult fit_palis(const PatchGrid& init, const SoftMask& target, const FitConfig& cfg,
                    const PatchGrid* reference) {
  cfg.validate();
  if (target.width() != init.width() || target.height() != init.height()) {
    throw UsageError("target mask does not match the grid dimensions");
  }

  FitResult result{init, {}};
  PatchGrid& cur = result.grid;
  FitReport& report = result.report;
  const std::vector<CellRef> cells = i_cell_refs(cur);
  double cur_loss = masked_loss(cur, target, cfg.raster);

  if (!cells.empty()) {
    std::vector<std::array<double, 4>> velocity(cells.size(), {0.0, 0.0, 0.0, 0.0});
    double step = cfg.learning_rate;
    double grad_scale = 0.0;

    for (int it = 0; it < cfg.max_iters; ++it) {
      report.loss_trace.push_back(cur_loss);
      ++report.iterations;

      const SoftMask soft = compose_soft_mask(cur, cfg.raster);
      const std::vector<double> upstream = dice_backward(soft, target);
      const std::vector<EndpointGradient> grads = grid_backward(cur, cfg.raster, upstream);

      if (it == 0) {
        for (const CellRef& c : cells) {
          const EndpointGradient& g = grads[cur.index(c.row, c.col)];
          grad_scale = std::max({grad_scale, std::abs(g.d_ax), std::abs(g.d_ay), std::abs(g.d_bx), std::abs(g.d_by)});
        }
        if (grad_scale < 1e-14) break;  // already stationary
      }

      auto propose = [&](double step_len) {
        PatchGrid next = cur;
        for (std::size_t n = 0; n < cells.size(); ++n) {
          const CellRef& c = cells[n];
          const EndpointGradient& g = grads[cur.index(c.row, c.col)];
          std::array<double, 4> dir{g.d_ax / grad_scale, g.d_ay / grad_scale, g.d_bx / grad_scale,
                                    g.d_by / grad_scale};
          if (cfg.optimizer == Optimizer::Momentum) {
            for (int k = 0; k < 4; ++k) velocity[n][k] = cfg.momentum * velocity[n][k] + dir[k];
            dir = velocity[n];
          }
          const LineSegment& l = *cur.at(c.row, c.col).segment;
          const LineSegment moved{{l.a.x - step_len * dir[0], l.a.y - step_len * dir[1]},
                                  {l.b.x - step_len * dir[2], l.b.y - step_len * dir[3]}};
          next.set_segment(c.row, c.col, clamped(moved, cur.rect(c.row, c.col)));
        }
        return next;
      };

      PatchGrid next = propose(step);
      double next_loss = masked_loss(next, target, cfg.raster);
      if (cfg.optimizer == Optimizer::GradientDescent) {
        // Backtrack until the loss does not increase.
        while (next_loss > cur_loss && step > cfg.learning_rate * 1e-12) {
          step *= 0.5;
          ++report.rejected_steps;
          next = propose(step);
          next_loss = masked_loss(next, target, cfg.raster);
        }
        if (next_loss > cur_loss) break;
      }

      const double delta = cur_loss - next_loss;
      step = std::min(cfg.learning_rate, 2.0 * step);
      cur = std::move(next);
      cur_loss = next_loss;
      if (std::abs(delta) < cfg.tol) break;
    }
  }

  report.final_loss = cur_loss;
  attach_reference(report, cur, reference);
  return result;
}

LineSegment canonicalize_segment(const LineSegment& l) {
  if (l.a.x < l.b.x) return l;
  if (l.a.x > l.b.x) return l.reversed();
  return l.a.y <= l.b.y ? l : l.reversed();
}

double l1_vector_loss(const LineSegment& pred, const LineSegment& label, bool sorted) {
  const LineSegment p = sorted ? canonicalize_segment(pred) : pred;
  const LineSegment t = sorted ? canonicalize_segment(label) : label;
  return std::abs(p.a.x - t.a.x) + std::abs(p.a.y - t.a.y) + std::abs(p.b.x - t.b.x) + std::abs(p.b.y - t.b.y);
}

namespace {

double approach(double value, double goal, double step) {
  const double diff = goal - value;
  if (std::abs(diff) <= step) return goal;
  return value + (diff > 0.0 ? step : -step);
}

Point approach(Point value, Point goal, double step) {
  return {approach(value.x, goal.x, step), approach(value.y, goal.y, step)};
}

}  // namespace

FitResult fit_vector_supervised(const PatchGrid& init, const PatchGrid& labels, VectorSupervision mode,
                                const FitConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  if (init.rows() != labels.rows() || init.cols() != labels.cols() || init.patch_size() != labels.patch_size()) {
    throw UsageError("label grid does not match the fitted grid");
  }
  for (std::size_t k = 0; k < init.cell_count(); ++k) {
    if (init.cells()[k].cls != labels.cells()[k].cls) {
      throw UsageError("patch class mismatch at cell " + std::to_string(k));
    }
  }

  const bool sorted = mode == VectorSupervision::Sorted;
  FitResult result{init, {}};
  PatchGrid& cur = result.grid;
  const std::vector<CellRef> cells = i_cell_refs(cur);
  if (sorted) {
    for (const CellRef& c : cells) cur.set_segment(c.row, c.col, canonicalize_segment(*cur.at(c.row, c.col).segment));
  }

  std::mt19937_64 rng(seed);
  std::bernoulli_distribution flip(0.5);
  auto total_loss = [&](const std::vector<LineSegment>& goals) {
    double loss = 0.0;
    for (std::size_t n = 0; n < cells.size(); ++n) {
      loss += l1_vector_loss(*cur.at(cells[n].row, cells[n].col).segment, goals[n], false);
    }
    return loss;
  };

  std::vector<LineSegment> goals(cells.size());
  double prev_loss = 0.0;
  for (int it = 0; it < cfg.max_iters && !cells.empty(); ++it) {
    for (std::size_t n = 0; n < cells.size(); ++n) {
      const LineSegment& label = *labels.at(cells[n].row, cells[n].col).segment;
      goals[n] = sorted ? canonicalize_segment(label) : (flip(rng) ? label.reversed() : label);
    }
    const double loss = total_loss(goals);
    result.report.loss_trace.push_back(loss);
    ++result.report.iterations;
    if (it > 0 && std::abs(prev_loss - loss) < cfg.tol) break;
    prev_loss = loss;

    for (std::size_t n = 0; n < cells.size(); ++n) {
      const CellRef& c = cells[n];
      const LineSegment& l = *cur.at(c.row, c.col).segment;
      const LineSegment moved{approach(l.a, goals[n].a, cfg.learning_rate),
                              approach(l.b, goals[n].b, cfg.learning_rate)};
      cur.set_segment(c.row, c.col, clamped(moved, cur.rect(c.row, c.col)));
    }
  }

  double final_loss = 0.0;
  for (const CellRef& c : cells) {
    final_loss += l1_vector_loss(*cur.at(c.row, c.col).segment, *labels.at(c.row, c.col).segment, sorted);
  }
  result.report.final_loss = final_loss;
  attach_reference(result.report, cur, &labels);
  return result;
}

double endpoint_error(const LineSegment& fitted, const LineSegment& reference) {
  const double same = distance(fitted.a, reference.a) + distance(fitted.b, reference.b);
  const double swapped = distance(fitted.a, reference.b) + distance(fitted.b, reference.a);
  return 0.5 * std::min(same, swapped);
}

double mean_endpoint_error(const PatchGrid& fitted, const PatchGrid& reference, std::vector<double>* per_cell) {
  if (fitted.rows() != reference.rows() || fitted.cols() != reference.cols()) {
    throw UsageError("reference grid does not match the fitted grid");
  }
  double total = 0.0;
  std::size_t n = 0;
  if (per_cell) per_cell->assign(fitted.cell_count(), 0.0);
  for (std::size_t k = 0; k < fitted.cell_count(); ++k) {
    const auto& f = fitted.cells()[k].segment;
    const auto& r = reference.cells()[k].segment;
    if (!f || !r) continue;
    const double e = endpoint_error(*f, *r);
    if (per_cell) (*per_cell)[k] = e;
    total += e;
    ++n;
  }
  return n == 0 ? 0.0 : total / static_cast<double>(n);
}

PatchGrid default_initialization(const PatchGrid& classes) {
  PatchGrid out = classes;
  const double half = classes.patch_size() / 4.0;
  for (std::size_t idx : classes.i_cells()) {
    const int row = static_cast<int>(idx) / classes.cols();
    const int col = static_cast<int>(idx) % classes.cols();
    const Point c = classes.rect(row, col).center();
    out.set_segment(row, col, {{c.x - half, c.y}, {c.x + half, c.y}});
  }
  return out;
}

}  // namespace palis
