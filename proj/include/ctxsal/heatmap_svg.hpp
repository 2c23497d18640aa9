#pragma once

#include <string>

#include "ctxsal/perturbation.hpp"

namespace ctxsal {

struct HeatmapOptions {
  double cell_width = 2.0;
  double cell_height = 12.0;
  std::string title;
};

/// Standalone SVG: one rect per mask entry (channels as rows, time as
/// columns), grayscale with 0 light and 1 dark, plus axis labels and ticks.
/// Output is a pure function of the inputs.
std::string render_heatmap_svg(const SaliencyMask& mask, const HeatmapOptions& opts = {});

}  // namespace ctxsal
