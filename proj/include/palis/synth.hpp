#pragma once

// Seeded synthetic road scenes. Coordinates are quantized to 1e-6 px so that
// a scene survives a graph-file round trip unchanged.

#include <cstdint>
#include <optional>
#include <string_view>

#include "palis/formats.hpp"

namespace palis {

enum class Scene { Grid, Plus, Overpass, Manhattan };

std::string_view to_string(Scene s);
std::optional<Scene> parse_scene(std::string_view s);

struct SynthParams {
  int width = 128;
  int height = 128;
  int patch_size = 8;

  void validate() const;
};

/// grid       regular lattice through cell centers, spacing 4p
/// plus       one degree-4 junction, arms within 8 degrees of the axes
/// overpass   two straight roads crossing at 70-90 degrees near a cell
///            center, no shared vertex
/// manhattan  axis-aligned streets (spacing >= 3p, never on a cell border)
///            with some interior blocks removed, leaving T-junctions
GraphDocument synth_scene(Scene scene, std::uint64_t seed, const SynthParams& params = {});

}  // namespace palis
