#include "palis/formats.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cctype>
#include <cstring>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <utility>

#include <json.hpp>

#include "palis/error.hpp"

namespace palis {

std::string_view to_string(FormatErrorKind kind) {
  switch (kind) {
    case FormatErrorKind::Io: return "io";
    case FormatErrorKind::Magic: return "bad magic";
    case FormatErrorKind::Header: return "bad header";
    case FormatErrorKind::Syntax: return "syntax";
    case FormatErrorKind::IndexOutOfRange: return "index out of range";
    case FormatErrorKind::Truncated: return "truncated";
    case FormatErrorKind::TrailingData: return "trailing data";
    case FormatErrorKind::Invariant: return "invariant violation";
  }
  return "unknown";
}

std::string format_fixed6(double v) {
  if (!std::isfinite(v)) throw InvariantError("cannot serialize a non-finite number");
  std::array<char, 64> buf{};
  const int n = std::snprintf(buf.data(), buf.size(), "%.6f", v);
  if (n < 0 || n >= static_cast<int>(buf.size())) throw InvariantError("number too large to serialize");
  return std::string(buf.data(), static_cast<std::size_t>(n));
}

namespace {

using nlohmann::json;

[[noreturn]] void fail(FormatErrorKind kind, const std::string& where, const std::string& what) {
  throw FormatError(kind, where + ": " + what);
}

json parse_json(std::string_view text) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    fail(FormatErrorKind::Syntax, "byte " + std::to_string(e.byte), e.what());
  } catch (const json::exception& e) {
    fail(FormatErrorKind::Syntax, "$", e.what());
  }
}

const json& field(const json& obj, const char* key, const std::string& path) {
  if (!obj.is_object()) fail(FormatErrorKind::Syntax, path, "expected an object");
  const auto it = obj.find(key);
  if (it == obj.end()) fail(FormatErrorKind::Syntax, path, std::string("missing field \"") + key + "\"");
  return *it;
}

std::int64_t integer(const json& v, const std::string& path) {
  if (!v.is_number_integer()) fail(FormatErrorKind::Syntax, path, "expected an integer");
  if (v.is_number_unsigned()) {
    const auto u = v.get<std::uint64_t>();
    if (u > static_cast<std::uint64_t>(INT64_MAX)) fail(FormatErrorKind::IndexOutOfRange, path, "integer too large");
    return static_cast<std::int64_t>(u);
  }
  return v.get<std::int64_t>();
}

double number(const json& v, const std::string& path) {
  if (!v.is_number()) fail(FormatErrorKind::Syntax, path, "expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) fail(FormatErrorKind::Invariant, path, "non-finite number");
  return d;
}

const json& array(const json& v, const std::string& path, std::optional<std::size_t> size = std::nullopt) {
  if (!v.is_array()) fail(FormatErrorKind::Syntax, path, "expected an array");
  if (size && v.size() != *size) {
    fail(FormatErrorKind::Syntax, path, "expected " + std::to_string(*size) + " elements, got " + std::to_string(v.size()));
  }
  return v;
}

void check_version(const json& doc, int expected) {
  const std::int64_t version = integer(field(doc, "version", "$"), "$.version");
  if (version != expected) {
    fail(FormatErrorKind::Header, "$.version",
         "unsupported version " + std::to_string(version) + " (expected " + std::to_string(expected) + ")");
  }
}

int dimension(const json& doc, const char* key) {
  const std::string path = std::string("$.") + key;
  const std::int64_t v = integer(field(doc, key, "$"), path);
  if (v <= 0 || v > (1 << 20)) fail(FormatErrorKind::Header, path, "dimension out of range: " + std::to_string(v));
  return static_cast<int>(v);
}

std::string indexed(const std::string& base, std::size_t i) { return base + "[" + std::to_string(i) + "]"; }

}  // namespace

std::string serialize_graph(const GraphDocument& doc) {
  doc.graph.validate();
  if (doc.width <= 0 || doc.height <= 0) throw InvariantError("graph canvas dimensions must be positive");
  std::string out = "{\n";
  out += "  \"version\": " + std::to_string(kGraphFormatVersion) + ",\n";
  out += "  \"width\": " + std::to_string(doc.width) + ",\n";
  out += "  \"height\": " + std::to_string(doc.height) + ",\n";
  out += "  \"nodes\": [";
  for (std::size_t i = 0; i < doc.graph.vertices.size(); ++i) {
    const Point p = doc.graph.vertices[i];
    out += i == 0 ? "\n    [" : ",\n    [";
    out += format_fixed6(p.x) + ", " + format_fixed6(p.y) + "]";
  }
  out += doc.graph.vertices.empty() ? "],\n" : "\n  ],\n";
  out += "  \"edges\": [";
  for (std::size_t k = 0; k < doc.graph.edges.size(); ++k) {
    const Edge& e = doc.graph.edges[k];
    out += k == 0 ? "\n    [" : ",\n    [";
    out += std::to_string(e.u) + ", " + std::to_string(e.v) + "]";
  }
  out += doc.graph.edges.empty() ? "]\n" : "\n  ]\n";
  out += "}\n";
  return out;
}

GraphDocument parse_graph(std::string_view text) {
  const json doc = parse_json(text);
  if (!doc.is_object()) fail(FormatErrorKind::Syntax, "$", "expected an object");
  check_version(doc, kGraphFormatVersion);
  GraphDocument out;
  out.width = dimension(doc, "width");
  out.height = dimension(doc, "height");

  const json& nodes = array(field(doc, "nodes", "$"), "$.nodes");
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const std::string path = indexed("$.nodes", i);
    const json& n = array(nodes[i], path, 2);
    out.graph.vertices.push_back({number(n[0], indexed(path, 0)), number(n[1], indexed(path, 1))});
  }

  const json& edges = array(field(doc, "edges", "$"), "$.edges");
  std::set<std::pair<std::uint32_t, std::uint32_t>> seen;
  for (std::size_t k = 0; k < edges.size(); ++k) {
    const std::string path = indexed("$.edges", k);
    const json& e = array(edges[k], path, 2);
    std::array<std::uint32_t, 2> ij{};
    for (std::size_t s = 0; s < 2; ++s) {
      const std::int64_t v = integer(e[s], indexed(path, s));
      if (v < 0 || static_cast<std::uint64_t>(v) >= out.graph.vertices.size()) {
        fail(FormatErrorKind::IndexOutOfRange, indexed(path, s),
             "node index " + std::to_string(v) + " with " + std::to_string(out.graph.vertices.size()) + " nodes");
      }
      ij[s] = static_cast<std::uint32_t>(v);
    }
    if (ij[0] == ij[1]) fail(FormatErrorKind::Invariant, path, "self-loop");
    if (!seen.insert(std::minmax(ij[0], ij[1])).second) fail(FormatErrorKind::Invariant, path, "duplicate edge");
    out.graph.add_edge(ij[0], ij[1]);
  }
  return out;
}

std::string serialize_grid(const PatchGrid& grid) {
  grid.validate();
  std::string out = "{\n";
  out += "  \"version\": " + std::to_string(kGridFormatVersion) + ",\n";
  out += "  \"patch_size\": " + std::to_string(grid.patch_size()) + ",\n";
  out += "  \"width\": " + std::to_string(grid.width()) + ",\n";
  out += "  \"height\": " + std::to_string(grid.height()) + ",\n";
  out += "  \"cells\": [";
  bool first = true;
  for (int row = 0; row < grid.rows(); ++row) {
    for (int col = 0; col < grid.cols(); ++col) {
      const PatchCell& c = grid.at(row, col);
      if (c.cls == PatchClass::Background) continue;
      out += first ? "\n    " : ",\n    ";
      first = false;
      out += "{\"row\": " + std::to_string(row) + ", \"col\": " + std::to_string(col) + ", \"class\": \"" +
             std::string(to_string(c.cls)) + "\"";
      if (c.segment) {
        const LineSegment& l = *c.segment;
        out += ", \"segment\": [" + format_fixed6(l.a.x) + ", " + format_fixed6(l.a.y) + ", " + format_fixed6(l.b.x) +
               ", " + format_fixed6(l.b.y) + "]";
      }
      out += "}";
    }
  }
  out += first ? "]\n" : "\n  ]\n";
  out += "}\n";
  return out;
}

PatchGrid parse_grid(std::string_view text) {
  const json doc = parse_json(text);
  if (!doc.is_object()) fail(FormatErrorKind::Syntax, "$", "expected an object");
  check_version(doc, kGridFormatVersion);
  const int patch_size = dimension(doc, "patch_size");
  const int width = dimension(doc, "width");
  const int height = dimension(doc, "height");
  if (width % patch_size != 0 || height % patch_size != 0) {
    fail(FormatErrorKind::Invariant, "$.patch_size", "patch size does not divide the image dimensions");
  }
  PatchGrid grid(width, height, patch_size);

  const json& cells = array(field(doc, "cells", "$"), "$.cells");
  std::vector<bool> seen(grid.cell_count(), false);
  for (std::size_t k = 0; k < cells.size(); ++k) {
    const std::string path = indexed("$.cells", k);
    const json& c = cells[k];
    const std::int64_t row = integer(field(c, "row", path), path + ".row");
    const std::int64_t col = integer(field(c, "col", path), path + ".col");
    if (row < 0 || row >= grid.rows()) fail(FormatErrorKind::IndexOutOfRange, path + ".row", "row " + std::to_string(row));
    if (col < 0 || col >= grid.cols()) fail(FormatErrorKind::IndexOutOfRange, path + ".col", "col " + std::to_string(col));
    const int r = static_cast<int>(row);
    const int q = static_cast<int>(col);
    if (seen[grid.index(r, q)]) fail(FormatErrorKind::Invariant, path, "cell listed twice");
    seen[grid.index(r, q)] = true;

    const json& cls_field = field(c, "class", path);
    if (!cls_field.is_string()) fail(FormatErrorKind::Syntax, path + ".class", "expected a string");
    const auto cls = parse_patch_class(cls_field.get<std::string>());
    if (!cls) {
      fail(FormatErrorKind::Syntax, path + ".class", "expected \"I\", \"X\", \"T\" or \"Background\"");
    }
    const bool has_segment = c.contains("segment");
    if (has_segment != (*cls == PatchClass::I)) {
      fail(FormatErrorKind::Invariant, path, has_segment ? "segment on a non-I cell" : "I cell without a segment");
    }
    try {
      if (has_segment) {
        const std::string spath = path + ".segment";
        const json& s = array(c["segment"], spath, 4);
        const LineSegment l{{number(s[0], indexed(spath, 0)), number(s[1], indexed(spath, 1))},
                            {number(s[2], indexed(spath, 2)), number(s[3], indexed(spath, 3))}};
        grid.set_segment(r, q, l);
      } else if (*cls == PatchClass::Background) {
        grid.set_background(r, q);
      } else {
        grid.set_junction(r, q, *cls);
      }
    } catch (const InvariantError& e) {
      fail(FormatErrorKind::Invariant, path, e.what());
    }
  }
  try {
    grid.validate();
  } catch (const InvariantError& e) {
    fail(FormatErrorKind::Invariant, "$.cells", e.what());
  }
  return grid;
}

namespace {

constexpr std::array<char, 4> kRasterMagic{'P', 'L', 'S', 'F'};
constexpr std::size_t kRasterHeader = 16;

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::uint32_t get_u32(std::string_view bytes, std::size_t at) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[at + i])) << (8 * i);
  return v;
}

std::string byte_at(std::size_t offset) { return "byte " + std::to_string(offset); }

}  // namespace

std::string serialize_float_raster(const SoftMask& mask) {
  mask.validate();
  std::string out(kRasterMagic.begin(), kRasterMagic.end());
  out.reserve(kRasterHeader + 4 * mask.size());
  put_u32(out, static_cast<std::uint32_t>(mask.width()));
  put_u32(out, static_cast<std::uint32_t>(mask.height()));
  put_u32(out, 0);
  for (double v : mask.values()) put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
  return out;
}

SoftMask parse_float_raster(std::string_view bytes) {
  const std::size_t magic_len = std::min<std::size_t>(bytes.size(), 4);
  if (std::memcmp(bytes.data(), kRasterMagic.data(), magic_len) != 0) {
    fail(FormatErrorKind::Magic, byte_at(0), "expected \"PLSF\"");
  }
  if (bytes.size() < kRasterHeader) {
    fail(FormatErrorKind::Truncated, byte_at(bytes.size()), "header needs 16 bytes");
  }
  const std::uint32_t width = get_u32(bytes, 4);
  const std::uint32_t height = get_u32(bytes, 8);
  if (get_u32(bytes, 12) != 0) fail(FormatErrorKind::Header, byte_at(12), "reserved word must be zero");
  constexpr std::uint32_t kMaxSide = 1u << 20;
  if (width == 0 || width > kMaxSide) fail(FormatErrorKind::Header, byte_at(4), "width " + std::to_string(width));
  if (height == 0 || height > kMaxSide) fail(FormatErrorKind::Header, byte_at(8), "height " + std::to_string(height));
  const std::uint64_t count = static_cast<std::uint64_t>(width) * height;
  const std::uint64_t expected = kRasterHeader + 4 * count;
  if (bytes.size() < expected) {
    fail(FormatErrorKind::Truncated, byte_at(bytes.size()), "payload needs " + std::to_string(expected) + " bytes");
  }
  if (bytes.size() > expected) fail(FormatErrorKind::TrailingData, byte_at(expected), "data after the payload");

  std::vector<double> values(count);
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t at = kRasterHeader + 4 * i;
    const double v = std::bit_cast<float>(get_u32(bytes, at));
    if (!(v >= 0.0 && v <= 1.0)) fail(FormatErrorKind::Invariant, byte_at(at), "value outside [0, 1]");
    values[i] = v;
  }
  return SoftMask(static_cast<int>(width), static_cast<int>(height), std::move(values));
}

void ByteMask::validate() const {
  if (width <= 0 || height <= 0) throw InvariantError("byte mask dimensions must be positive");
  if (pixels.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
    throw InvariantError("byte mask pixel count does not match its dimensions");
  }
}

ByteMask to_byte_mask(const SoftMask& mask) {
  return {mask.width(), mask.height(), to_preview_bytes(mask)};
}

std::string serialize_byte_mask(const ByteMask& mask) {
  mask.validate();
  std::string out = "P5\n" + std::to_string(mask.width) + " " + std::to_string(mask.height) + "\n255\n";
  out.append(reinterpret_cast<const char*>(mask.pixels.data()), mask.pixels.size());
  return out;
}

ByteMask parse_byte_mask(std::string_view bytes) {
  const std::size_t magic_len = std::min<std::size_t>(bytes.size(), 2);
  if (bytes.substr(0, magic_len) != std::string_view("P5").substr(0, magic_len)) {
    fail(FormatErrorKind::Magic, byte_at(0), "expected \"P5\"");
  }
  std::size_t pos = 2;
  auto skip_space = [&] {
    while (pos < bytes.size()) {
      const char c = bytes[pos];
      if (c == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      } else if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
        ++pos;
      } else {
        break;
      }
    }
  };
  auto header_number = [&](const char* name) {
    const std::size_t start = pos;
    if (start < bytes.size() && !std::isspace(static_cast<unsigned char>(bytes[start])) && bytes[start] != '#') {
      fail(FormatErrorKind::Header, byte_at(start), std::string("expected whitespace before ") + name);
    }
    skip_space();
    if (pos >= bytes.size()) fail(FormatErrorKind::Truncated, byte_at(pos), std::string("missing ") + name);
    const std::size_t digits_at = pos;
    std::uint64_t v = 0;
    while (pos < bytes.size() && bytes[pos] >= '0' && bytes[pos] <= '9' && pos - digits_at < 9) {
      v = v * 10 + static_cast<std::uint64_t>(bytes[pos] - '0');
      ++pos;
    }
    if (pos == digits_at) fail(FormatErrorKind::Header, byte_at(pos), std::string("expected ") + name);
    if (pos < bytes.size() && bytes[pos] >= '0' && bytes[pos] <= '9') {
      fail(FormatErrorKind::Header, byte_at(digits_at), std::string(name) + " too large");
    }
    return std::pair{v, digits_at};
  };
  const auto [width, width_at] = header_number("width");
  const auto [height, height_at] = header_number("height");
  const auto [maxval, maxval_at] = header_number("max value");
  if (width == 0 || width > (1u << 20)) fail(FormatErrorKind::Header, byte_at(width_at), "width out of range");
  if (height == 0 || height > (1u << 20)) fail(FormatErrorKind::Header, byte_at(height_at), "height out of range");
  if (maxval != 255) fail(FormatErrorKind::Header, byte_at(maxval_at), "max value must be 255");
  if (pos >= bytes.size()) fail(FormatErrorKind::Truncated, byte_at(pos), "missing header terminator");
  if (!std::isspace(static_cast<unsigned char>(bytes[pos]))) {
    fail(FormatErrorKind::Header, byte_at(pos), "expected whitespace after the max value");
  }
  ++pos;
  const std::uint64_t count = width * height;
  if (bytes.size() - pos < count) {
    fail(FormatErrorKind::Truncated, byte_at(bytes.size()), "payload needs " + std::to_string(count) + " bytes");
  }
  if (bytes.size() - pos > count) fail(FormatErrorKind::TrailingData, byte_at(pos + count), "data after the payload");
  ByteMask out{static_cast<int>(width), static_cast<int>(height), {}};
  out.pixels.assign(reinterpret_cast<const std::uint8_t*>(bytes.data() + pos),
                    reinterpret_cast<const std::uint8_t*>(bytes.data() + pos + count));
  return out;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(FormatErrorKind::Io, path.string(), "cannot open for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) fail(FormatErrorKind::Io, path.string(), "read failed");
  return std::move(ss).str();
}

void write_file(const std::filesystem::path& path, std::string_view data) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(FormatErrorKind::Io, path.string(), "cannot open for writing");
  out.write(data.data(), static_cast<std::streamsize>(data.size()));
  if (!out) fail(FormatErrorKind::Io, path.string(), "write failed");
}

namespace {

template <typename Fn>
auto with_path(const std::filesystem::path& path, Fn&& fn) {
  try {
    return fn();
  } catch (const FormatError& e) {
    if (e.kind() == FormatErrorKind::Io) throw;
    const std::string prefix = std::string(to_string(e.kind())) + ": ";
    std::string msg = e.what();
    if (msg.rfind(prefix, 0) == 0) msg.erase(0, prefix.size());
    throw FormatError(e.kind(), path.string() + ": " + msg);
  }
}

}  // namespace

GraphDocument load_graph(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  return with_path(path, [&] { return parse_graph(text); });
}
void save_graph(const std::filesystem::path& path, const GraphDocument& doc) { write_file(path, serialize_graph(doc)); }

PatchGrid load_grid(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  return with_path(path, [&] { return parse_grid(text); });
}
void save_grid(const std::filesystem::path& path, const PatchGrid& grid) { write_file(path, serialize_grid(grid)); }

SoftMask load_float_raster(const std::filesystem::path& path) {
  const std::string bytes = read_file(path);
  return with_path(path, [&] { return parse_float_raster(bytes); });
}
void save_float_raster(const std::filesystem::path& path, const SoftMask& mask) {
  write_file(path, serialize_float_raster(mask));
}

ByteMask load_byte_mask(const std::filesystem::path& path) {
  const std::string bytes = read_file(path);
  return with_path(path, [&] { return parse_byte_mask(bytes); });
}
void save_byte_mask(const std::filesystem::path& path, const ByteMask& mask) {
  write_file(path, serialize_byte_mask(mask));
}

namespace {

std::string_view class_tint(PatchClass c) {
  switch (c) {
    case PatchClass::I: return "#3b82f6";
    case PatchClass::X: return "#dc2626";
    case PatchClass::T: return "#16a34a";
    case PatchClass::Background: break;
  }
  return "none";
}

}  // namespace

std::string render_svg(const RoadGraph& g, int width, int height, const SvgOverlay& overlay) {
  const std::string w = std::to_string(width);
  const std::string h = std::to_string(height);
  std::string out = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + w + "\" height=\"" + h + "\" viewBox=\"0 0 " + w +
         " " + h + "\">\n";
  out += "<rect x=\"0\" y=\"0\" width=\"" + w + "\" height=\"" + h + "\" fill=\"#111111\"/>\n";

  if (overlay.mask) {
    const SoftMask& m = *overlay.mask;
    out += "<g fill=\"#ffffff\">\n";
    for (int row = 0; row < m.height(); ++row) {
      for (int col = 0; col < m.width(); ++col) {
        const double v = m.at(row, col);
        if (std::lround(255.0 * v) == 0) continue;
        out += "<rect x=\"" + std::to_string(col) + "\" y=\"" + std::to_string(row) +
               "\" width=\"1\" height=\"1\" fill-opacity=\"" + format_fixed6(v) + "\"/>\n";
      }
    }
    out += "</g>\n";
  }

  if (overlay.grid) {
    const PatchGrid& grid = *overlay.grid;
    const std::string p = std::to_string(grid.patch_size());
    out += "<g fill-opacity=\"0.25\">\n";
    for (int row = 0; row < grid.rows(); ++row) {
      for (int col = 0; col < grid.cols(); ++col) {
        const PatchClass c = grid.at(row, col).cls;
        if (c == PatchClass::Background) continue;
        const Point o = grid.rect(row, col).origin();
        out += "<rect x=\"" + format_fixed6(o.x) + "\" y=\"" + format_fixed6(o.y) + "\" width=\"" + p +
               "\" height=\"" + p + "\" fill=\"" + std::string(class_tint(c)) + "\"/>\n";
      }
    }
    out += "</g>\n";
  }

  out += "<g stroke=\"#f97316\" stroke-width=\"1\" stroke-linecap=\"round\">\n";
  for (const Edge& e : g.edges) {
    const Point a = g.vertices[e.u];
    const Point b = g.vertices[e.v];
    out += "<line x1=\"" + format_fixed6(a.x) + "\" y1=\"" + format_fixed6(a.y) + "\" x2=\"" + format_fixed6(b.x) +
           "\" y2=\"" + format_fixed6(b.y) + "\"/>\n";
  }
  out += "</g>\n";

  out += "<g fill=\"#ef4444\">\n";
  const std::vector<int> deg = g.degrees();
  for (std::size_t v = 0; v < g.vertices.size(); ++v) {
    if (deg[v] < 3) continue;
    out += "<circle cx=\"" + format_fixed6(g.vertices[v].x) + "\" cy=\"" + format_fixed6(g.vertices[v].y) +
           "\" r=\"2\"/>\n";
  }
  out += "</g>\n</svg>\n";
  return out;
}

}  // namespace palis
