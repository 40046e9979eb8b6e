#include "skintone/image.hpp"

#include "skintone/error.hpp"

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

namespace skintone {

RgbImage read_image(const std::filesystem::path& path) {
  cv::Mat bgr;
  try {
    bgr = cv::imread(path.string(), cv::IMREAD_COLOR);
  } catch (const cv::Exception& e) {
    throw Error(Errc::io, "cannot decode image '" + path.string() + "': " + e.what());
  }
  if (bgr.empty()) throw Error(Errc::io, "cannot read image '" + path.string() + "'");
  if (bgr.depth() != CV_8U || bgr.channels() != 3) {
    throw Error(Errc::io, "unsupported pixel format in '" + path.string() + "'");
  }
  RgbImage out(bgr.cols, bgr.rows);
  for (int y = 0; y < bgr.rows; ++y) {
    const auto* row = bgr.ptr<cv::Vec3b>(y);
    for (int x = 0; x < bgr.cols; ++x) out.at(x, y) = {row[x][2], row[x][1], row[x][0]};
  }
  return out;
}

void write_png(const std::filesystem::path& path, const RgbImage& image) {
  cv::Mat bgr(image.height, image.width, CV_8UC3);
  for (int y = 0; y < image.height; ++y) {
    auto* row = bgr.ptr<cv::Vec3b>(y);
    for (int x = 0; x < image.width; ++x) {
      const RgbPixel p = image.at(x, y);
      row[x] = cv::Vec3b(p.b, p.g, p.r);
    }
  }
  const std::vector<int> params = {cv::IMWRITE_PNG_COMPRESSION, 6};
  bool ok = false;
  try {
    ok = cv::imwrite(path.string(), bgr, params);
  } catch (const cv::Exception& e) {
    throw Error(Errc::io, "cannot write '" + path.string() + "': " + e.what());
  }
  if (!ok) throw Error(Errc::io, "cannot write '" + path.string() + "'");
}

} // namespace skintone
