#pragma once

// File formats:
//   graph file    JSON {version, width, height, nodes [[x, y]], edges [[i, j]]}
//   grid file     JSON {version, patch_size, width, height,
//                       cells [{row, col, class, segment?}]}
//   float raster  "PLSF", u32 width, u32 height, u32 0, f32[width*height], all LE
//   byte mask     binary PGM: "P5\n<w> <h>\n255\n" + bytes
//
// Text numbers are written with exactly six fractional digits. Loaders
// throw FormatError; the message carries a JSON path or byte offset.

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "palis/patch_grid.hpp"
#include "palis/raster.hpp"
#include "palis/road_graph.hpp"

namespace palis {

inline constexpr int kGraphFormatVersion = 1;
inline constexpr int kGridFormatVersion = 1;
inline constexpr int kFloatRasterVersion = 1;  // implied by the magic; reserved word is 0

struct GraphDocument {
  int width = 0;
  int height = 0;
  RoadGraph graph;

  friend bool operator==(const GraphDocument&, const GraphDocument&) = default;
};

std::string serialize_graph(const GraphDocument& doc);
GraphDocument parse_graph(std::string_view text);

std::string serialize_grid(const PatchGrid& grid);
PatchGrid parse_grid(std::string_view text);

/// Values are stored as float32; doubles that are not exactly representable
/// are rounded on write.
std::string serialize_float_raster(const SoftMask& mask);
SoftMask parse_float_raster(std::string_view bytes);

struct ByteMask {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;

  void validate() const;
  friend bool operator==(const ByteMask&, const ByteMask&) = default;
};

ByteMask to_byte_mask(const SoftMask& mask);
std::string serialize_byte_mask(const ByteMask& mask);
ByteMask parse_byte_mask(std::string_view bytes);

/// Formats a number with exactly six fractional digits.
std::string format_fixed6(double v);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view data);

GraphDocument load_graph(const std::filesystem::path& path);
void save_graph(const std::filesystem::path& path, const GraphDocument& doc);
PatchGrid load_grid(const std::filesystem::path& path);
void save_grid(const std::filesystem::path& path, const PatchGrid& grid);
SoftMask load_float_raster(const std::filesystem::path& path);
void save_float_raster(const std::filesystem::path& path, const SoftMask& mask);
ByteMask load_byte_mask(const std::filesystem::path& path);
void save_byte_mask(const std::filesystem::path& path, const ByteMask& mask);

struct SvgOverlay {
  const PatchGrid* grid = nullptr;
  const SoftMask* mask = nullptr;
};

/// Deterministic SVG: optional soft-mask underlay, patch-class tint, one
/// <line> per edge, one <circle> per vertex of degree >= 3.
std::string render_svg(const RoadGraph& g, int width, int height, const SvgOverlay& overlay = {});

}  // namespace palis
