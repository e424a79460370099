#include "rsf/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "rsf/errors.hpp"
#include "rsf/parallel.hpp"
#include "rsf/random.hpp"

namespace fs = std::filesystem;

namespace rsf {

namespace {

constexpr std::array<std::string_view, 6> kKindNames = {"upscale",   "downscale",  "rotate_cw",
                                                        "rotate_ccw", "shear",     "jpeg"};

constexpr std::array<std::string_view, kChannelCount> kFlagNames = {
    "jpeg_quality_low", "upsampled", "downsampled", "rotated_cw", "rotated_ccw", "sheared"};

constexpr std::array<TransformKind, 5> kGeometricKinds = {
    TransformKind::UpScale, TransformKind::DownScale, TransformKind::RotateCw,
    TransformKind::RotateCcw, TransformKind::Shear};

TransformKind kind_of_task(Task task) {
  switch (task) {
    case Task::JpegQuality: return TransformKind::JpegCompress;
    case Task::Upsample: return TransformKind::UpScale;
    case Task::Downsample: return TransformKind::DownScale;
    case Task::RotateCw: return TransformKind::RotateCw;
    case Task::RotateCcw: return TransformKind::RotateCcw;
    case Task::Shear: return TransformKind::Shear;
  }
  throw ParameterError("unknown task");
}

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

int uniform_int(std::mt19937_64& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

TransformSpec draw_step(std::mt19937_64& rng, TransformKind kind, const ChainOptions& o) {
  switch (kind) {
    case TransformKind::UpScale: return {kind, uniform(rng, o.upscale_min, o.upscale_max)};
    case TransformKind::DownScale: return {kind, uniform(rng, o.downscale_min, o.downscale_max)};
    case TransformKind::RotateCw:
    case TransformKind::RotateCcw: return {kind, uniform(rng, o.rotation_min, o.rotation_max)};
    case TransformKind::Shear: {
      const double k = uniform(rng, o.shear_min, o.shear_max);
      return {kind, rng() % 2 == 0 ? k : -k};
    }
    case TransformKind::JpegCompress:
      return {kind, static_cast<double>(uniform_int(rng, o.jpeg_low_min, o.jpeg_high_max))};
  }
  throw ParameterError("unknown transform kind");
}

AffineMap map_for(const TransformSpec& step) {
  switch (step.kind) {
    case TransformKind::UpScale:
    case TransformKind::DownScale: return AffineMap::scale(step.parameter);
    case TransformKind::RotateCw: return AffineMap::rotation_cw(step.parameter);
    case TransformKind::RotateCcw: return AffineMap::rotation_cw(-step.parameter);
    case TransformKind::Shear: return AffineMap::shear(step.parameter);
    case TransformKind::JpegCompress: break;
  }
  throw InvalidTransformError("JPEG compression is not a geometric transform");
}

Plane center_crop(const Plane& img, int width, int height) {
  if (img.width() < width || img.height() < height) {
    throw DatasetError("transformed region is smaller than the requested crop");
  }
  return crop(img, (img.width() - width) / 2, (img.height() - height) / 2, width, height);
}

struct SplitPlan {
  std::vector<int> train_sources;
  std::vector<int> test_sources;
  int n_train = 0;
};

SplitPlan plan_split(std::size_t source_count, int n, double train_fraction, std::uint64_t seed) {
  if (source_count < 2) throw DatasetError("at least two source images are required");
  if (n < 10) throw DatasetError("a dataset needs at least 10 patches");
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw ParameterError("train fraction must lie in (0,1)");
  }
  std::vector<int> order(source_count);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(derive_seed(seed, SeedStream::Split));
  std::shuffle(order.begin(), order.end(), rng);
  const int s = static_cast<int>(source_count);
  const int n_train_src = std::clamp(static_cast<int>(std::lround(train_fraction * s)), 1, s - 1);
  SplitPlan plan;
  plan.train_sources.assign(order.begin(), order.begin() + n_train_src);
  plan.test_sources.assign(order.begin() + n_train_src, order.end());
  std::sort(plan.train_sources.begin(), plan.train_sources.end());
  std::sort(plan.test_sources.begin(), plan.test_sources.end());
  plan.n_train = 2 * static_cast<int>(std::lround(train_fraction * n / 2.0));
  plan.n_train = std::clamp(plan.n_train, 2, n - 2);
  return plan;
}

// Split, label and source for the i-th record. Labels alternate within each
// split so both halves are balanced.
struct Slot {
  Split split;
  bool positive;
  int source;
  int second_source;
  std::uint64_t seed;
};

Slot plan_slot(const SplitPlan& plan, int i, std::uint64_t seed) {
  Slot slot{};
  const bool train = i < plan.n_train;
  const int local = train ? i : i - plan.n_train;
  slot.split = train ? Split::Train : Split::Test;
  slot.positive = local % 2 == 0;
  slot.seed = derive_seed(seed, SeedStream::Dataset, static_cast<std::uint64_t>(i));
  std::mt19937_64 rng(slot.seed);
  const auto& pool = train ? plan.train_sources : plan.test_sources;
  const int a = uniform_int(rng, 0, static_cast<int>(pool.size()) - 1);
  slot.source = pool[a];
  int b = a;
  if (pool.size() > 1) {
    b = uniform_int(rng, 0, static_cast<int>(pool.size()) - 2);
    if (b >= a) ++b;
  }
  slot.second_source = pool[b];
  return slot;
}

std::pair<int, int> region_origin(const Plane& src, int region, std::uint64_t seed) {
  std::mt19937_64 rng(splitmix64(seed ^ 0xA5A5A5A5ULL));
  return {uniform_int(rng, 0, src.width() - region), uniform_int(rng, 0, src.height() - region)};
}

void require_sources(const std::vector<SourceImage>& sources, int region) {
  for (const auto& s : sources) {
    if (s.image.width() < region || s.image.height() < region) {
      throw DatasetError("source image '" + s.id + "' is smaller than the " +
                         std::to_string(region) + " px working region");
    }
  }
}

std::string patch_file_name(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "patches/%06zu.png", index);
  return buf;
}

}  // namespace

std::string_view to_string(TransformKind kind) { return kKindNames[static_cast<int>(kind)]; }

TransformKind transform_kind_from_string(std::string_view name) {
  for (std::size_t i = 0; i < kKindNames.size(); ++i) {
    if (kKindNames[i] == name) return static_cast<TransformKind>(i);
  }
  throw ParameterError("unknown transform kind '" + std::string(name) + "'");
}

void TransformSpec::validate() const {
  const double p = parameter;
  bool ok = std::isfinite(p);
  switch (kind) {
    case TransformKind::UpScale: ok = ok && p > 1.0; break;
    case TransformKind::DownScale: ok = ok && p > 0.0 && p < 1.0; break;
    case TransformKind::RotateCw:
    case TransformKind::RotateCcw: ok = ok && p > 0.0; break;
    case TransformKind::Shear: ok = ok && p != 0.0; break;
    case TransformKind::JpegCompress: ok = ok && p >= 1.0 && p <= 100.0 && p == std::floor(p); break;
  }
  if (!ok) {
    throw InvalidTransformError("invalid parameter " + std::to_string(p) + " for " +
                                std::string(to_string(kind)));
  }
}

ImageBuffer apply_chain(const ImageBuffer& img, const TransformChain& chain, Interpolation interp) {
  ImageBuffer out = img;
  for (const auto& step : chain.steps) {
    step.validate();
    if (step.kind == TransformKind::JpegCompress) {
      out = jpeg_roundtrip(out, static_cast<int>(step.parameter));
    } else {
      out = quantize_8bit(clamp_unit(affine_resample(out, map_for(step), interp)));
    }
  }
  return out;
}

std::string_view to_string(Task task) { return kChannelNames[static_cast<int>(task)]; }

Task task_from_string(std::string_view name) {
  for (int i = 0; i < kChannelCount; ++i) {
    if (kChannelNames[i] == name) return static_cast<Task>(i);
  }
  throw ParameterError("unknown task '" + std::string(name) + "'");
}

PatchLabel PatchLabel::from_chain(const TransformChain& chain) {
  PatchLabel label;
  for (const auto& step : chain.steps) {
    switch (step.kind) {
      case TransformKind::JpegCompress:
        label.flags[static_cast<int>(Task::JpegQuality)] = step.parameter <= kJpegLowMaxQuality;
        break;
      case TransformKind::UpScale: label.flags[static_cast<int>(Task::Upsample)] = true; break;
      case TransformKind::DownScale: label.flags[static_cast<int>(Task::Downsample)] = true; break;
      case TransformKind::RotateCw: label.flags[static_cast<int>(Task::RotateCw)] = true; break;
      case TransformKind::RotateCcw: label.flags[static_cast<int>(Task::RotateCcw)] = true; break;
      case TransformKind::Shear: label.flags[static_cast<int>(Task::Shear)] = true; break;
    }
  }
  return label;
}

void ChainOptions::validate() const {
  auto check = [](bool ok, const char* what) {
    if (!ok) throw ParameterError(std::string("chain options: ") + what);
  };
  check(upscale_min > 1.0 && upscale_min <= upscale_max, "upscale range must lie above 1");
  check(downscale_min > 0.0 && downscale_min <= downscale_max && downscale_max < 1.0,
        "downscale range must lie in (0,1)");
  check(rotation_min > 0.0 && rotation_min <= rotation_max, "rotation range must be positive");
  check(shear_min > 0.0 && shear_min <= shear_max, "shear range must be positive");
  check(jpeg_low_min >= 1 && jpeg_low_min <= jpeg_low_max && jpeg_low_max <= kJpegLowMaxQuality,
        "low JPEG quality range must lie in [1,85]");
  check(jpeg_high_min > kJpegLowMaxQuality && jpeg_high_min <= jpeg_high_max && jpeg_high_max <= 100,
        "high JPEG quality range must lie in (85,100]");
  check(max_extra_steps >= 0 && max_extra_steps <= 2, "extra steps must lie in [0,2]");
}

TransformChain random_chain(std::uint64_t seed, Task task, bool positive, const ChainOptions& options) {
  options.validate();
  const TransformKind task_kind = kind_of_task(task);
  std::mt19937_64 rng(seed);
  TransformChain chain;
  chain.seed = seed;

  std::vector<TransformKind> candidates;
  for (auto k : kGeometricKinds) {
    if (k != task_kind) candidates.push_back(k);
  }
  std::shuffle(candidates.begin(), candidates.end(), rng);

  const bool jpeg_task = task_kind == TransformKind::JpegCompress;
  const bool extra_jpeg = !jpeg_task && options.allow_jpeg && rng() % 2 == 0;
  int budget = 3 - ((jpeg_task || extra_jpeg) ? 1 : 0) - ((positive && !jpeg_task) ? 1 : 0);
  const int extras = std::min(uniform_int(rng, 0, options.max_extra_steps), budget);

  for (int e = 0; e < extras; ++e) chain.steps.push_back(draw_step(rng, candidates[e], options));
  if (positive && !jpeg_task) chain.steps.push_back(draw_step(rng, task_kind, options));
  std::shuffle(chain.steps.begin(), chain.steps.end(), rng);

  if (jpeg_task) {
    // Negatives are either high-quality JPEG or never compressed.
    const bool compress = positive || rng() % 2 == 0;
    const int q = positive ? uniform_int(rng, options.jpeg_low_min, options.jpeg_low_max)
                           : uniform_int(rng, options.jpeg_high_min, options.jpeg_high_max);
    if (compress) chain.steps.push_back({TransformKind::JpegCompress, static_cast<double>(q)});
  } else if (extra_jpeg) {
    chain.steps.push_back(draw_step(rng, TransformKind::JpegCompress, options));
  }
  return chain;
}

std::string_view to_string(Split split) { return split == Split::Train ? "train" : "test"; }

int region_size_for_patch(int patch_size) {
  const int r = static_cast<int>(std::ceil(2.5 * patch_size));
  return r + (r % 2);
}

PatchDataset build_patch_dataset(const std::vector<SourceImage>& sources, Task task, int n,
                                 std::uint64_t seed, const DatasetOptions& options) {
  options.chain.validate();
  if (options.patch_size < 8) throw ParameterError("patch size must be at least 8");
  const SplitPlan plan = plan_split(sources.size(), n, options.train_fraction, seed);
  const int p = options.patch_size;
  const int region = region_size_for_patch(p);
  require_sources(sources, region);

  PatchDataset ds;
  ds.records.resize(static_cast<std::size_t>(n));
  ds.patches.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const Slot slot = plan_slot(plan, i, seed);
    PatchRecord& rec = ds.records[i];
    rec.file = patch_file_name(i);
    rec.task = std::string(to_string(task));
    rec.label = slot.positive ? 1 : 0;
    rec.chain = random_chain(splitmix64(slot.seed), task, slot.positive, options.chain);
    rec.flags = PatchLabel::from_chain(rec.chain);
    rec.source = sources[slot.source].id;
    rec.split = slot.split;
    const auto [rx, ry] = region_origin(sources[slot.source].image, region, slot.seed);
    rec.origin_x = rx + (region - p) / 2;
    rec.origin_y = ry + (region - p) / 2;
  }
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t i) {
    const PatchRecord& rec = ds.records[i];
    const Slot slot = plan_slot(plan, static_cast<int>(i), seed);
    const Plane& src = sources[slot.source].image;
    const Plane work = crop(src, rec.origin_x - (region - p) / 2, rec.origin_y - (region - p) / 2,
                            region, region);
    ds.patches[i] = center_crop(apply_chain(work, rec.chain, options.interp), p, p);
  });
  return ds;
}

PatchDataset build_splice_dataset(const std::vector<SourceImage>& sources, int n,
                                  std::uint64_t seed, const SpliceDatasetOptions& options) {
  options.chain.validate();
  if (options.jpeg_min < 1 || options.jpeg_min > options.jpeg_max || options.jpeg_max > 100) {
    throw ParameterError("splice JPEG quality range must lie in [1,100]");
  }
  const SplitPlan plan = plan_split(sources.size(), n, options.train_fraction, seed);
  const int p = options.patch_size;
  const int region = region_size_for_patch(p);
  const int margin = p / 4;
  const int splice_side = p + 2 * margin;
  const int donor_side =
      std::max(region, static_cast<int>(std::ceil(splice_side / options.chain.downscale_min)) + 2);
  require_sources(sources, donor_side);

  struct Job {
    int base;
    int donor;
    int bx, by, dx, dy;
    TransformChain donor_chain;
    int quality;
  };
  std::vector<Job> jobs(static_cast<std::size_t>(n));
  PatchDataset ds;
  ds.records.resize(static_cast<std::size_t>(n));
  ds.patches.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const Slot slot = plan_slot(plan, i, seed);
    std::mt19937_64 rng(splitmix64(slot.seed));
    Job& job = jobs[i];
    job.base = slot.source;
    job.donor = slot.second_source;
    std::tie(job.bx, job.by) = region_origin(sources[job.base].image, region, slot.seed);
    std::tie(job.dx, job.dy) =
        region_origin(sources[job.donor].image, donor_side, splitmix64(slot.seed));
    job.donor_chain.seed = splitmix64(slot.seed);
    if (slot.positive) {
      const auto kind = kGeometricKinds[uniform_int(rng, 0, static_cast<int>(kGeometricKinds.size()) - 1)];
      job.donor_chain.steps.push_back(draw_step(rng, kind, options.chain));
    }
    job.quality = uniform_int(rng, options.jpeg_min, options.jpeg_max);

    PatchRecord& rec = ds.records[i];
    rec.file = patch_file_name(i);
    rec.task = std::string(kSpliceTask);
    rec.label = slot.positive ? 1 : 0;
    rec.chain = job.donor_chain;
    rec.chain.steps.push_back({TransformKind::JpegCompress, static_cast<double>(job.quality)});
    rec.flags = PatchLabel::from_chain(rec.chain);
    rec.source = sources[job.base].id;
    rec.split = slot.split;
    rec.origin_x = job.bx + (region - p) / 2;
    rec.origin_y = job.by + (region - p) / 2;
  }
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t i) {
    const Job& job = jobs[i];
    const Plane base = crop(sources[job.base].image, job.bx, job.by, region, region);
    Plane out;
    if (ds.records[i].label == 1) {
      const Plane donor = crop(sources[job.donor].image, job.dx, job.dy, donor_side, donor_side);
      const Rect rect{(region - splice_side) / 2, (region - splice_side) / 2, splice_side,
                      splice_side};
      out = splice_forgery(base, donor, job.donor_chain, rect, job.quality, options.interp).image;
    } else {
      out = jpeg_roundtrip(base, job.quality);
    }
    ds.patches[i] = center_crop(out, p, p);
  });
  return ds;
}

nlohmann::json to_json(const PatchRecord& record) {
  nlohmann::json flags = nlohmann::json::object();
  for (int t = 0; t < kChannelCount; ++t) flags[std::string(kFlagNames[t])] = record.flags.flags[t];
  nlohmann::json chain = nlohmann::json::array();
  for (const auto& s : record.chain.steps) {
    chain.push_back({{"kind", std::string(to_string(s.kind))}, {"parameter", s.parameter}});
  }
  return {{"schema", kManifestSchema},
          {"file", record.file},
          {"task", record.task},
          {"label", record.label},
          {"flags", flags},
          {"chain", chain},
          {"chain_seed", record.chain.seed},
          {"source", record.source},
          {"split", std::string(to_string(record.split))},
          {"origin", {record.origin_x, record.origin_y}}};
}

PatchRecord patch_record_from_json(const nlohmann::json& j) {
  try {
    if (j.at("schema").get<int>() != kManifestSchema) {
      throw FormatError("unsupported manifest schema " + j.at("schema").dump());
    }
    PatchRecord rec;
    rec.file = j.at("file").get<std::string>();
    rec.task = j.at("task").get<std::string>();
    rec.label = j.at("label").get<int>();
    if (rec.label != 0 && rec.label != 1) throw FormatError("manifest label must be 0 or 1");
    for (int t = 0; t < kChannelCount; ++t) {
      rec.flags.flags[t] = j.at("flags").at(std::string(kFlagNames[t])).get<bool>();
    }
    for (const auto& s : j.at("chain")) {
      TransformSpec spec{transform_kind_from_string(s.at("kind").get<std::string>()),
                         s.at("parameter").get<double>()};
      spec.validate();
      rec.chain.steps.push_back(spec);
    }
    rec.chain.seed = j.at("chain_seed").get<std::uint64_t>();
    rec.source = j.at("source").get<std::string>();
    const auto split = j.at("split").get<std::string>();
    if (split != "train" && split != "test") throw FormatError("manifest split must be train or test");
    rec.split = split == "train" ? Split::Train : Split::Test;
    rec.origin_x = j.at("origin").at(0).get<int>();
    rec.origin_y = j.at("origin").at(1).get<int>();
    return rec;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed manifest record: ") + e.what());
  }
}

void write_patch_dataset(const fs::path& dir, const PatchDataset& dataset) {
  if (dataset.records.size() != dataset.patches.size()) {
    throw ParameterError("dataset records and patches differ in count");
  }
  std::error_code ec;
  fs::create_directories(dir / "patches", ec);
  if (ec) throw IoError("cannot create " + (dir / "patches").string() + ": " + ec.message());
  std::ofstream manifest(dir / "manifest.jsonl", std::ios::binary);
  if (!manifest) throw IoError("cannot write " + (dir / "manifest.jsonl").string());
  for (std::size_t i = 0; i < dataset.records.size(); ++i) {
    save_png(dir / dataset.records[i].file, dataset.patches[i]);
    manifest << to_json(dataset.records[i]).dump() << '\n';
  }
  if (!manifest) throw IoError("failed writing " + (dir / "manifest.jsonl").string());
}

PatchDataset read_patch_dataset(const fs::path& dir) {
  std::ifstream in(dir / "manifest.jsonl", std::ios::binary);
  if (!in) throw IoError("cannot read " + (dir / "manifest.jsonl").string());
  PatchDataset ds;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw FormatError("manifest line " + std::to_string(line_no) + ": " + e.what());
    }
    ds.records.push_back(patch_record_from_json(j));
    ds.patches.push_back(load_image(dir / ds.records.back().file));
  }
  return ds;
}

std::vector<SourceImage> load_source_images(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw IoError("source directory not found: " + dir.string());
  static const std::set<std::string> kExt = {".png", ".jpg", ".jpeg", ".tif", ".tiff", ".bmp"};
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (!e.is_regular_file()) continue;
    std::string ext = e.path().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    if (kExt.count(ext)) files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<SourceImage> out;
  for (const auto& f : files) out.push_back({f.stem().string(), load_image(f)});
  return out;
}

SpliceResult splice_forgery(const ImageBuffer& base, const ImageBuffer& donor,
                            const TransformChain& chain, const Rect& region,
                            std::optional<int> rejpeg_quality, Interpolation interp) {
  if (region.width <= 0 || region.height <= 0 || region.x < 0 || region.y < 0 ||
      region.x + region.width > base.width() || region.y + region.height > base.height()) {
    throw ParameterError("splice region does not fit inside the base image");
  }
  const ImageBuffer moved = apply_chain(donor, chain, interp);
  if (moved.width() < region.width || moved.height() < region.height) {
    throw ParameterError("transformed donor is smaller than the splice region");
  }
  SpliceResult result{base, BinaryMask(base.width(), base.height())};
  paste(result.image,
        crop(moved, (moved.width() - region.width) / 2, (moved.height() - region.height) / 2,
             region.width, region.height),
        region.x, region.y);
  for (int y = region.y; y < region.y + region.height; ++y) {
    for (int x = region.x; x < region.x + region.width; ++x) result.mask.set(x, y, true);
  }
  if (rejpeg_quality) result.image = jpeg_roundtrip(result.image, *rejpeg_quality);
  return result;
}

GroundTruthSet load_ground_truth(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw IoError("ground-truth directory not found: " + dir.string());
  std::vector<fs::path> images;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (!e.is_regular_file() || e.path().extension() != ".png") continue;
    const std::string stem = e.path().stem().string();
    if (stem.size() >= 5 && stem.compare(stem.size() - 5, 5, "_mask") == 0) continue;
    images.push_back(e.path());
  }
  std::sort(images.begin(), images.end());

  GroundTruthSet set;
  std::vector<std::string> unreadable;
  for (const auto& path : images) {
    const fs::path mask_path = path.parent_path() / (path.stem().string() + "_mask.png");
    if (!fs::exists(mask_path)) {
      set.warnings.push_back(path.filename().string() + ": no matching mask, skipped");
      continue;
    }
    ImageBuffer img;
    ImageBuffer mask;
    try {
      img = load_image(path);
    } catch (const Error&) {
      unreadable.push_back(path.string());
      continue;
    }
    try {
      mask = load_image(mask_path);
    } catch (const Error&) {
      unreadable.push_back(mask_path.string());
      continue;
    }
    if (!img.same_shape(mask)) {
      std::ostringstream msg;
      msg << path.filename().string() << ": mask is " << mask.width() << "x" << mask.height()
          << " but image is " << img.width() << "x" << img.height() << ", skipped";
      set.warnings.push_back(msg.str());
      continue;
    }
    set.entries.push_back({path.stem().string(), std::move(img), BinaryMask::from_plane(mask, 0.5)});
  }
  if (!unreadable.empty()) {
    std::string msg = "unreadable ground-truth files:";
    for (const auto& f : unreadable) msg += " " + f;
    throw IoError(msg);
  }
  return set;
}

}  // namespace rsf
