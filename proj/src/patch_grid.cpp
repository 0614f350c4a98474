#include "palis/patch_grid.hpp"

#include <string>

#include "palis/error.hpp"

namespace palis {

std::string_view to_string(PatchClass c) {
  switch (c) {
    case PatchClass::Background:
      return "Background";
    case PatchClass::I:
      return "I";
    case PatchClass::X:
      return "X";
    case PatchClass::T:
      return "T";
  }
  return "?";
}

std::optional<PatchClass> parse_patch_class(std::string_view s) {
  if (s == "I") return PatchClass::I;
  if (s == "X") return PatchClass::X;
  if (s == "T") return PatchClass::T;
  if (s == "Background") return PatchClass::Background;
  return std::nullopt;
}

PatchGrid::PatchGrid(int width, int height, int patch_size)
    : width_(width), height_(height), patch_size_(patch_size) {
  if (patch_size <= 0) throw InvariantError("patch size must be positive");
  if (width < 0 || height < 0) throw InvariantError("image dimensions must be non-negative");
  if (width % patch_size != 0 || height % patch_size != 0) {
    throw InvariantError("patch size " + std::to_string(patch_size) + " does not divide " +
                         std::to_string(width) + "x" + std::to_string(height));
  }
  rows_ = height / patch_size;
  cols_ = width / patch_size;
  cells_.resize(static_cast<std::size_t>(rows_) * cols_);
}

void PatchGrid::set_background(int row, int col) { at(row, col) = PatchCell{}; }

void PatchGrid::set_junction(int row, int col, PatchClass cls) {
  if (cls != PatchClass::X && cls != PatchClass::T) {
    throw InvariantError("set_junction expects class X or T");
  }
  at(row, col) = PatchCell{cls, std::nullopt};
}

void PatchGrid::set_segment(int row, int col, const LineSegment& segment) {
  at(row, col) = PatchCell{PatchClass::I, segment};
}

std::vector<std::size_t> PatchGrid::i_cells() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < cells_.size(); ++i) {
    if (cells_[i].cls == PatchClass::I) out.push_back(i);
  }
  return out;
}

std::size_t PatchGrid::count(PatchClass cls) const {
  std::size_t n = 0;
  for (const PatchCell& c : cells_) n += c.cls == cls ? 1 : 0;
  return n;
}

void PatchGrid::validate() const {
  if (static_cast<std::size_t>(rows_) * cols_ != cells_.size() || rows_ * patch_size_ != height_ ||
      cols_ * patch_size_ != width_) {
    throw InvariantError("grid dimensions are inconsistent");
  }
  for (int r = 0; r < rows_; ++r) {
    for (int c = 0; c < cols_; ++c) {
      const PatchCell& cell = at(r, c);
      const std::string where = "cell (" + std::to_string(r) + ", " + std::to_string(c) + ")";
      if ((cell.cls == PatchClass::I) != cell.segment.has_value()) {
        throw InvariantError(where + ": segment must be present exactly for class I");
      }
      if (!cell.segment) continue;
      const PatchRect rc = rect(r, c);
      for (Point p : {cell.segment->a, cell.segment->b}) {
        if (!is_finite(p)) throw InvariantError(where + ": non-finite endpoint");
        if (!rc.contains(p, kCellContainmentTolerance)) {
          throw InvariantError(where + ": endpoint outside the cell footprint");
        }
      }
    }
  }
}

}  // namespace palis
