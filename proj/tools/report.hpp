#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "rsf/pipeline.hpp"

namespace rsf::cli {

struct NamedCurve {
  std::string name;
  RocCurve roc;
};

/// heatmap_<ch>.png (grid), filtered_<ch>.png (pixels), mask_<ch>.png for
/// selected channels, gray.png and mask.png.
void write_detection_images(const std::filesystem::path& dir, const DetectionResult& r);

/// selected_channels, per-channel Otsu statistics, grid geometry and confidence.
nlohmann::json detection_report(const DetectionResult& r, const DetectConfig& cfg);

/// Composes image, gray mask, fused mask and the six filtered heatmaps from a
/// detect output directory. Returns the detect report summary.
nlohmann::json render_detection_panel(const std::filesystem::path& detect_dir,
                                      const std::filesystem::path& out_png);

void render_roc_plot(const std::vector<NamedCurve>& curves, const std::filesystem::path& out_png);

}  // namespace rsf::cli
