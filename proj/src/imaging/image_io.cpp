#include "ccc/imaging/image_io.hpp"

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

#include "ccc/error.hpp"

namespace ccc {

namespace {

cv::Mat to_bgr(const ImageRGB& img) {
  cv::Mat m(img.height(), img.width(), CV_8UC3);
  const auto src = img.bytes();
  for (int y = 0; y < img.height(); ++y) {
    auto* row = m.ptr<std::uint8_t>(y);
    const std::uint8_t* s = src.data() + static_cast<std::size_t>(y) * img.width() * 3;
    for (int x = 0; x < img.width(); ++x) {
      row[3 * x] = s[3 * x + 2];
      row[3 * x + 1] = s[3 * x + 1];
      row[3 * x + 2] = s[3 * x];
    }
  }
  return m;
}

const std::vector<int> kPngParams{cv::IMWRITE_PNG_COMPRESSION, 6};

}  // namespace

ImageRGB read_image(const std::filesystem::path& path) {
  cv::Mat m;
  try {
    m = cv::imread(path.string(), cv::IMREAD_COLOR);
  } catch (const cv::Exception& e) {
    throw Error(ErrorCode::Io, "cannot decode " + path.string() + ": " + e.what());
  }
  if (m.empty()) throw Error(ErrorCode::Io, "cannot read image " + path.string());
  std::vector<std::uint8_t> data(static_cast<std::size_t>(m.rows) * m.cols * 3);
  for (int y = 0; y < m.rows; ++y) {
    const auto* row = m.ptr<std::uint8_t>(y);
    std::uint8_t* d = data.data() + static_cast<std::size_t>(y) * m.cols * 3;
    for (int x = 0; x < m.cols; ++x) {
      d[3 * x] = row[3 * x + 2];
      d[3 * x + 1] = row[3 * x + 1];
      d[3 * x + 2] = row[3 * x];
    }
  }
  return ImageRGB(m.cols, m.rows, std::move(data));
}

void write_png(const std::filesystem::path& path, const ImageRGB& img) {
  bool ok = false;
  try {
    ok = cv::imwrite(path.string(), to_bgr(img), kPngParams);
  } catch (const cv::Exception& e) {
    throw Error(ErrorCode::Io, "cannot write " + path.string() + ": " + e.what());
  }
  if (!ok) throw Error(ErrorCode::Io, "cannot write " + path.string());
}

void write_mask_png(const std::filesystem::path& path, const BinaryMask& mask) {
  cv::Mat m(mask.height(), mask.width(), CV_8UC1);
  for (int y = 0; y < mask.height(); ++y)
    for (int x = 0; x < mask.width(); ++x) m.at<std::uint8_t>(y, x) = mask.at(x, y) ? 255 : 0;
  if (!cv::imwrite(path.string(), m, kPngParams)) {
    throw Error(ErrorCode::Io, "cannot write " + path.string());
  }
}

BinaryMask read_mask_png(const std::filesystem::path& path) {
  const cv::Mat m = cv::imread(path.string(), cv::IMREAD_GRAYSCALE);
  if (m.empty()) throw Error(ErrorCode::Io, "cannot read mask " + path.string());
  BinaryMask out(m.cols, m.rows);
  for (int y = 0; y < m.rows; ++y)
    for (int x = 0; x < m.cols; ++x) out.set(x, y, m.at<std::uint8_t>(y, x) >= 128);
  return out;
}

std::vector<std::uint8_t> encode_png(const ImageRGB& img) {
  std::vector<std::uint8_t> buf;
  if (!cv::imencode(".png", to_bgr(img), buf, kPngParams)) {
    throw Error(ErrorCode::Io, "PNG encoding failed");
  }
  return buf;
}

}  // namespace ccc
