#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rsf/imaging.hpp"
#include "rsf/segmentation.hpp"
#include "json.hpp"

namespace rsf {

enum class TransformKind { UpScale, DownScale, RotateCw, RotateCcw, Shear, JpegCompress };

std::string_view to_string(TransformKind kind);
TransformKind transform_kind_from_string(std::string_view name);

struct TransformSpec {
  TransformKind kind = TransformKind::UpScale;
  double parameter = 1.0;

  void validate() const;
  friend bool operator==(const TransformSpec&, const TransformSpec&) = default;
};

struct TransformChain {
  std::vector<TransformSpec> steps;
  std::uint64_t seed = 0;

  friend bool operator==(const TransformChain&, const TransformChain&) = default;
};

/// Applies each step to the whole image: geometric steps resample with the
/// given interpolation onto a canvas holding the result and quantize to 8
/// bits; JPEG steps round-trip through the codec.
ImageBuffer apply_chain(const ImageBuffer& img, const TransformChain& chain,
                        Interpolation interp = Interpolation::Bilinear);

/// The six binary tasks share the heatmap channel enumeration.
using Task = Channel;

std::string_view to_string(Task task);
Task task_from_string(std::string_view name);

struct PatchLabel {
  // Indexed by Task: jpeg_quality_low, upsampled, downsampled, rotated_cw,
  // rotated_ccw, sheared.
  std::array<bool, kChannelCount> flags{};

  bool operator[](Task t) const { return flags[static_cast<int>(t)]; }
  static PatchLabel from_chain(const TransformChain& chain);
};

inline constexpr int kJpegLowMaxQuality = 85;

struct ChainOptions {
  double upscale_min = 1.05, upscale_max = 2.0;
  double downscale_min = 0.5, downscale_max = 0.95;
  double rotation_min = 1.0, rotation_max = 45.0;
  double shear_min = 0.05, shear_max = 0.3;
  int jpeg_low_min = 50, jpeg_low_max = 84;
  int jpeg_high_min = 86, jpeg_high_max = 100;
  bool allow_jpeg = true;      // JPEG as an extra step for non-JPEG tasks
  int max_extra_steps = 2;     // other transforms mixed into a chain

  void validate() const;
};

/// Deterministic in (seed, task, positive). Positive chains contain exactly
/// one step of the task's transform; negative chains contain none. Both may
/// carry other transforms. For the JPEG task positives end with a low-quality
/// JPEG step; negatives end with a high-quality one or are never compressed.
TransformChain random_chain(std::uint64_t seed, Task task, bool positive,
                            const ChainOptions& options = {});

struct SourceImage {
  std::string id;
  ImageBuffer image;
};

enum class Split { Train, Test };
std::string_view to_string(Split split);

// Name of the pipeline-2 task whose positives are resampled, recompressed
// splice patches and whose negatives are recompressed pristine patches.
inline constexpr std::string_view kSpliceTask = "splice";

struct PatchRecord {
  std::string file;  // relative to the dataset directory
  std::string task;
  int label = 0;
  PatchLabel flags;
  TransformChain chain;
  std::string source;
  Split split = Split::Train;
  int origin_x = 0;
  int origin_y = 0;
};

struct PatchDataset {
  std::vector<PatchRecord> records;
  std::vector<ImageBuffer> patches;  // parallel to records
};

struct DatasetOptions {
  int patch_size = 64;
  double train_fraction = 0.8;
  Interpolation interp = Interpolation::Bilinear;
  ChainOptions chain;
};

/// Transform-then-crop patch generation with exact 50/50 labels per split and
/// source-disjoint train/test splits.
PatchDataset build_patch_dataset(const std::vector<SourceImage>& sources, Task task, int n,
                                 std::uint64_t seed, const DatasetOptions& options = {});

struct SpliceDatasetOptions {
  int patch_size = 64;
  double train_fraction = 0.8;
  Interpolation interp = Interpolation::Bilinear;
  ChainOptions chain;          // parameter ranges of the donor resampling step
  int jpeg_min = 75, jpeg_max = 95;  // recompression of every patch
};

/// Positives: a donor region from another source, resampled by one random
/// geometric step, pasted over the patch window, then the region is
/// recompressed. Negatives: the pristine region recompressed the same way.
PatchDataset build_splice_dataset(const std::vector<SourceImage>& sources, int n,
                                  std::uint64_t seed, const SpliceDatasetOptions& options = {});

/// Side of the square source region transformed around each patch.
int region_size_for_patch(int patch_size);

inline constexpr int kManifestSchema = 1;

nlohmann::json to_json(const PatchRecord& record);
PatchRecord patch_record_from_json(const nlohmann::json& j);

/// Writes patches/<index>.png and manifest.jsonl under dir.
void write_patch_dataset(const std::filesystem::path& dir, const PatchDataset& dataset);
PatchDataset read_patch_dataset(const std::filesystem::path& dir);

/// Loads every PNG/JPEG/TIFF/BMP in a directory (sorted by name) as a source.
std::vector<SourceImage> load_source_images(const std::filesystem::path& dir);

struct Rect {
  int x = 0;
  int y = 0;
  int width = 0;
  int height = 0;
};

struct SpliceResult {
  ImageBuffer image;
  BinaryMask mask;
};

/// Transforms the whole donor by the chain, takes the central region-sized
/// crop and pastes it into base at region. Optionally re-compresses.
SpliceResult splice_forgery(const ImageBuffer& base, const ImageBuffer& donor,
                            const TransformChain& chain, const Rect& region,
                            std::optional<int> rejpeg_quality = std::nullopt,
                            Interpolation interp = Interpolation::Bilinear);

struct GroundTruthEntry {
  std::string name;
  ImageBuffer image;
  BinaryMask mask;
};

struct GroundTruthSet {
  std::vector<GroundTruthEntry> entries;
  std::vector<std::string> warnings;
};

/// Pairs `<name>.png` with `<name>_mask.png`; dimension mismatches are skipped
/// with a warning, unreadable files raise IoError naming all offenders.
GroundTruthSet load_ground_truth(const std::filesystem::path& dir);

}  // namespace rsf
