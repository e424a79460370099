#include "report.hpp"

#include <cstdio>
#include <fstream>

#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>

#include "rsf/errors.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace rsf::cli {

namespace {

constexpr int kTile = 256;
constexpr int kLabel = 22;

cv::Mat to_u8(const Plane& p) {
  cv::Mat m(p.height(), p.width(), CV_8UC1);
  for (int y = 0; y < p.height(); ++y) {
    for (int x = 0; x < p.width(); ++x) {
      m.at<std::uint8_t>(y, x) = cv::saturate_cast<std::uint8_t>(p.at(x, y) * 255.0 + 0.5);
    }
  }
  return m;
}

cv::Mat tile(const cv::Mat& gray, bool color, const std::string& label) {
  cv::Mat img;
  cv::resize(gray, img, {kTile, kTile}, 0, 0, cv::INTER_NEAREST);
  if (color) {
    cv::applyColorMap(img, img, cv::COLORMAP_JET);
  } else {
    cv::cvtColor(img, img, cv::COLOR_GRAY2BGR);
  }
  cv::Mat out(kTile + kLabel, kTile, CV_8UC3, cv::Scalar(255, 255, 255));
  img.copyTo(out(cv::Rect(0, kLabel, kTile, kTile)));
  cv::putText(out, label, {4, kLabel - 6}, cv::FONT_HERSHEY_SIMPLEX, 0.45, {0, 0, 0}, 1, cv::LINE_AA);
  return out;
}

cv::Mat read_gray(const fs::path& p) {
  cv::Mat m = cv::imread(p.string(), cv::IMREAD_GRAYSCALE);
  if (m.empty()) throw IoError("cannot read " + p.string());
  return m;
}

void write_png(const fs::path& p, const cv::Mat& m) {
  if (!cv::imwrite(p.string(), m)) throw IoError("cannot write " + p.string());
}

}  // namespace

void write_detection_images(const fs::path& dir, const DetectionResult& r) {
  for (int c = 0; c < kChannelCount; ++c) {
    const std::string name(kChannelNames[c]);
    save_png(dir / ("heatmap_" + name + ".png"), r.heatmaps.channels[c]);
    save_png(dir / ("filtered_" + name + ".png"), r.upsampled[c]);
    if (r.channels[c].selected) save_png(dir / ("mask_" + name + ".png"), r.channels[c].mask.to_plane());
  }
  save_png(dir / "gray.png", r.gray);
  save_png(dir / "mask.png", r.mask.to_plane());
}

json detection_report(const DetectionResult& r, const DetectConfig& cfg) {
  json selected = json::array();
  json otsu = json::object();
  for (int c = 0; c < kChannelCount; ++c) {
    const auto& ch = r.channels[c];
    const std::string name(kChannelNames[c]);
    if (ch.selected) selected.push_back(name);
    json o = {{"selected", ch.selected}, {"walker_fallback", ch.walker_fallback},
              {"heatmap_mean", r.heatmaps.channels[c].mean()},
              {"heatmap_max", r.heatmaps.channels[c].max()}};
    if (ch.otsu) {
      o["threshold"] = ch.otsu->threshold;
      o["threshold_level"] = (ch.otsu->threshold + 1.0) / cfg.histogram_bins;
      o["eta"] = ch.otsu->eta;
      o["mass"] = {ch.otsu->mass[0], ch.otsu->mass[1]};
    } else {
      o["threshold"] = nullptr;
      o["eta"] = nullptr;
    }
    otsu[name] = o;
  }
  return {{"selected_channels", selected},
          {"otsu", otsu},
          {"confidence_score", r.confidence},
          {"mask_fraction", r.mask.size() ? static_cast<double>(r.mask.count()) / r.mask.size() : 0.0},
          {"grid",
           {{"rows", r.heatmaps.grid.rows},
            {"cols", r.heatmaps.grid.cols},
            {"patch_size", r.heatmaps.grid.patch_size},
            {"stride", r.heatmaps.grid.stride}}}};
}

json render_detection_panel(const fs::path& detect_dir, const fs::path& out_png) {
  std::ifstream in(detect_dir / "report.json");
  if (!in) throw IoError("no report.json in " + detect_dir.string());
  json report;
  try {
    report = json::parse(in);
  } catch (const json::exception& e) {
    throw FormatError("report.json is not valid JSON: " + std::string(e.what()));
  }
  std::vector<cv::Mat> top;
  if (report.contains("image") && fs::exists(report["image"].get<std::string>())) {
    top.push_back(tile(to_u8(load_image(report["image"].get<std::string>())), false, "input"));
  }
  char conf[64];
  std::snprintf(conf, sizeof conf, "gray (confidence %.3f)", report.value("confidence_score", 0.0));
  top.push_back(tile(read_gray(detect_dir / "gray.png"), true, conf));
  top.push_back(tile(read_gray(detect_dir / "mask.png"), false, "fused mask"));
  std::vector<cv::Mat> bottom;
  for (const auto name : kChannelNames) {
    const std::string n(name);
    bool selected = false;
    for (const auto& s : report.value("selected_channels", json::array())) selected |= s == n;
    bottom.push_back(tile(read_gray(detect_dir / ("filtered_" + n + ".png")), true,
                          n + (selected ? " *" : "")));
  }
  cv::Mat row1;
  cv::Mat row2;
  cv::hconcat(top, row1);
  cv::hconcat(bottom, row2);
  cv::Mat pad(row1.rows, row2.cols - row1.cols, CV_8UC3, cv::Scalar(255, 255, 255));
  cv::hconcat(row1, pad, row1);
  cv::Mat panel;
  cv::vconcat(row1, row2, panel);
  write_png(out_png, panel);
  return {{"panel", out_png.string()},
          {"confidence_score", report.value("confidence_score", 0.0)},
          {"selected_channels", report.value("selected_channels", json::array())}};
}

void render_roc_plot(const std::vector<NamedCurve>& curves, const fs::path& out_png) {
  constexpr int kSize = 480;
  constexpr int kMargin = 50;
  const int side = kSize - 2 * kMargin;
  cv::Mat img(kSize, kSize, CV_8UC3, cv::Scalar(255, 255, 255));
  auto pt = [&](double fpr, double tpr) {
    return cv::Point(kMargin + static_cast<int>(fpr * side + 0.5),
                     kSize - kMargin - static_cast<int>(tpr * side + 0.5));
  };
  cv::rectangle(img, pt(0, 1), pt(1, 0), {0, 0, 0}, 1);
  cv::line(img, pt(0, 0), pt(1, 1), {180, 180, 180}, 1, cv::LINE_AA);
  cv::putText(img, "false positive rate", {kSize / 2 - 70, kSize - 15}, cv::FONT_HERSHEY_SIMPLEX, 0.45,
              {0, 0, 0}, 1, cv::LINE_AA);
  cv::putText(img, "TPR", {8, kSize / 2}, cv::FONT_HERSHEY_SIMPLEX, 0.45, {0, 0, 0}, 1, cv::LINE_AA);
  const cv::Scalar palette[] = {{200, 80, 0}, {0, 0, 200}, {0, 150, 0}, {150, 0, 150}, {0, 140, 220}, {80, 80, 80}};
  for (std::size_t k = 0; k < curves.size(); ++k) {
    const auto& roc = curves[k].roc;
    const cv::Scalar color = palette[k % std::size(palette)];
    for (std::size_t i = 1; i < roc.fpr.size(); ++i) {
      cv::line(img, pt(roc.fpr[i - 1], roc.tpr[i - 1]), pt(roc.fpr[i], roc.tpr[i]), color, 2, cv::LINE_AA);
    }
    char label[128];
    std::snprintf(label, sizeof label, "%s AUC %.3f", curves[k].name.c_str(), roc.auc);
    cv::putText(img, label, {kMargin + side / 2, kSize - kMargin - 12 - 18 * static_cast<int>(k)},
                cv::FONT_HERSHEY_SIMPLEX, 0.45, color, 1, cv::LINE_AA);
  }
  write_png(out_png, img);
}

}  // namespace rsf::cli
