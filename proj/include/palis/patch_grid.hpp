#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "palis/geometry.hpp"

namespace palis {

enum class PatchClass : std::uint8_t { Background = 0, I = 1, X = 2, T = 3 };

inline constexpr int kPatchClassCount = 4;

std::string_view to_string(PatchClass c);
/// Parses "I", "X", "T" or "Background"; empty on anything else.
std::optional<PatchClass> parse_patch_class(std::string_view s);

struct PatchCell {
  PatchClass cls = PatchClass::Background;
  std::optional<LineSegment> segment;

  friend bool operator==(const PatchCell&, const PatchCell&) = default;
};

/// The H/p x W/p patch lattice: patch classes plus one segment per I-cell.
class PatchGrid {
 public:
  PatchGrid() = default;
  /// All-background grid; throws InvariantError unless p divides both
  /// dimensions.
  PatchGrid(int width, int height, int patch_size);

  int width() const { return width_; }
  int height() const { return height_; }
  int patch_size() const { return patch_size_; }
  int rows() const { return rows_; }
  int cols() const { return cols_; }
  std::size_t cell_count() const { return cells_.size(); }

  bool in_bounds(int row, int col) const { return row >= 0 && row < rows_ && col >= 0 && col < cols_; }
  PatchRect rect(int row, int col) const { return {row, col, patch_size_}; }

  const PatchCell& at(int row, int col) const { return cells_[index(row, col)]; }
  PatchCell& at(int row, int col) { return cells_[index(row, col)]; }
  const std::vector<PatchCell>& cells() const { return cells_; }

  void set_background(int row, int col);
  void set_junction(int row, int col, PatchClass cls);
  void set_segment(int row, int col, const LineSegment& segment);

  /// Row-major indices of all I-cells.
  std::vector<std::size_t> i_cells() const;
  std::size_t count(PatchClass cls) const;

  /// Throws InvariantError on the first broken invariant: segment present
  /// iff class I, finite endpoints inside the cell (1e-6 px tolerance).
  void validate() const;

  std::size_t index(int row, int col) const { return static_cast<std::size_t>(row) * cols_ + col; }

  friend bool operator==(const PatchGrid&, const PatchGrid&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  int patch_size_ = 8;
  int rows_ = 0;
  int cols_ = 0;
  std::vector<PatchCell> cells_;
};

inline constexpr double kCellContainmentTolerance = 1e-6;

}  // namespace palis
