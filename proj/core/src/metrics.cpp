// Copyright 2026 The SCS Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "scs/metrics.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <string>

#include "scs/error.hpp"

namespace scs {

Mask::Mask(std::size_t width, std::size_t height)
    : width_(width), height_(height), pixels_(width * height, 0) {
  if (width == 0 || height == 0)
    fail(ErrorCode::kInvalidArgument, "mask dimensions must be positive");
}

Mask::Mask(std::size_t width, std::size_t height, std::vector<std::uint8_t> pixels)
    : width_(width), height_(height), pixels_(std::move(pixels)) {
  if (width == 0 || height == 0)
    fail(ErrorCode::kInvalidArgument, "mask dimensions must be positive");
  if (pixels_.size() != width * height) {
    fail(ErrorCode::kShapeMismatch, "mask pixel count does not equal width*height");
  }
  for (auto& p : pixels_) p = p != 0 ? 1 : 0;
}

std::size_t Mask::foreground_count() const noexcept {
  std::size_t n = 0;
  for (auto p : pixels_) n += p;
  return n;
}

Mask Mask::complement() const {
  Mask out(*this);
  for (auto& p : out.pixels_) p = p ? 0 : 1;
  return out;
}

GrayImage GrayImage::filled(std::size_t width, std::size_t height, std::uint8_t value) {
  return GrayImage{width, height, std::vector<std::uint8_t>(width * height, value)};
}

namespace {

void check_same_dims(std::size_t wa, std::size_t ha, std::size_t wb, std::size_t hb) {
  if (wa != wb || ha != hb) {
    fail(ErrorCode::kDimensionMismatch, std::to_string(wa) + "x" + std::to_string(ha) + " vs " +
                                            std::to_string(wb) + "x" + std::to_string(hb));
  }
}

void check_image(const GrayImage& img) {
  if (img.width == 0 || img.height == 0 || img.pixels.size() != img.width * img.height) {
    fail(ErrorCode::kShapeMismatch, "gray image pixel count does not equal width*height");
  }
}

}  // namespace

double iou(const Mask& pred, const Mask& gt) {
  check_same_dims(pred.width(), pred.height(), gt.width(), gt.height());
  std::uint64_t inter = 0;
  std::uint64_t uni = 0;
  const auto a = pred.pixels();
  const auto b = gt.pixels();
  for (std::size_t i = 0; i < a.size(); ++i) {
    inter += (a[i] & b[i]);
    uni += (a[i] | b[i]);
  }
  if (uni == 0) return 1.0;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

double miou(std::span<const LabeledMaskPair> pairs) {
  if (pairs.empty()) fail(ErrorCode::kEmptyInput, "mIoU over no mask pairs");
  std::map<int, std::pair<double, std::size_t>> per_class;
  for (const auto& p : pairs) {
    auto& [sum, count] = per_class[p.label];
    sum += iou(p.pred, p.gt);
    ++count;
  }
  double total = 0.0;
  for (const auto& [label, acc] : per_class) total += acc.first / static_cast<double>(acc.second);
  return total / static_cast<double>(per_class.size());
}

double fbiou(std::span<const MaskPair> pairs) {
  if (pairs.empty()) fail(ErrorCode::kEmptyInput, "FB-IoU over no mask pairs");
  double fg = 0.0;
  double bg = 0.0;
  for (const auto& p : pairs) {
    fg += iou(p.pred, p.gt);
    bg += iou(p.pred.complement(), p.gt.complement());
  }
  const auto n = static_cast<double>(pairs.size());
  return 0.5 * (fg / n + bg / n);
}

PsnrResult psnr(const GrayImage& a, const GrayImage& b) {
  check_image(a);
  check_image(b);
  check_same_dims(a.width, a.height, b.width, b.height);
  std::uint64_t sse = 0;
  for (std::size_t i = 0; i < a.pixels.size(); ++i) {
    const auto d = static_cast<std::int64_t>(a.pixels[i]) - static_cast<std::int64_t>(b.pixels[i]);
    sse += static_cast<std::uint64_t>(d * d);
  }
  if (sse == 0) return {true, std::numeric_limits<double>::infinity()};
  const double mse = static_cast<double>(sse) / static_cast<double>(a.pixels.size());
  return {false, 10.0 * std::log10(255.0 * 255.0 / mse)};
}

double ssim(const GrayImage& a, const GrayImage& b) {
  check_image(a);
  check_image(b);
  check_same_dims(a.width, a.height, b.width, b.height);
  if (a.width < kSsimWindow || a.height < kSsimWindow) {
    fail(ErrorCode::kInvalidArgument, "SSIM needs images of at least 8x8");
  }
  constexpr double c1 = (0.01 * 255.0) * (0.01 * 255.0);
  constexpr double c2 = (0.03 * 255.0) * (0.03 * 255.0);
  constexpr std::int64_t n = kSsimWindow * kSsimWindow;
  constexpr double n2 = static_cast<double>(n * n);

  double total = 0.0;
  std::size_t windows = 0;
  for (std::size_t y0 = 0; y0 + kSsimWindow <= a.height; ++y0) {
    for (std::size_t x0 = 0; x0 + kSsimWindow <= a.width; ++x0) {
      std::int64_t sa = 0, sb = 0, saa = 0, sbb = 0, sab = 0;
      for (std::size_t y = y0; y < y0 + kSsimWindow; ++y) {
        for (std::size_t x = x0; x < x0 + kSsimWindow; ++x) {
          const std::int64_t pa = a.pixels[y * a.width + x];
          const std::int64_t pb = b.pixels[y * b.width + x];
          sa += pa;
          sb += pb;
          saa += pa * pa;
          sbb += pb * pb;
          sab += pa * pb;
        }
      }
      // Integer numerators keep the window statistics exact.
      const double mu_a = static_cast<double>(sa) / n;
      const double mu_b = static_cast<double>(sb) / n;
      const double var_a = static_cast<double>(n * saa - sa * sa) / n2;
      const double var_b = static_cast<double>(n * sbb - sb * sb) / n2;
      const double cov = static_cast<double>(n * sab - sa * sb) / n2;
      const double num = (2.0 * mu_a * mu_b + c1) * (2.0 * cov + c2);
      const double den = (mu_a * mu_a + mu_b * mu_b + c1) * (var_a + var_b + c2);
      total += num / den;
      ++windows;
    }
  }
  return total / static_cast<double>(windows);
}

namespace {

std::string next_token(std::istream& in) {
  std::string tok;
  int c = in.get();
  while (c != EOF) {
    if (c == '#') {
      while (c != EOF && c != '\n') c = in.get();
    } else if (std::isspace(c)) {
      if (!tok.empty()) return tok;
    } else {
      tok.push_back(static_cast<char>(c));
    }
    c = in.get();
  }
  return tok;
}

}  // namespace

GrayImage read_pgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIo, "cannot open '" + path.string() + "'");
  if (next_token(in) != "P5")
    fail(ErrorCode::kMalformedHeader, "'" + path.string() + "' is not a P5 PGM");
  GrayImage img;
  int maxval = 0;
  try {
    img.width = std::stoul(next_token(in));
    img.height = std::stoul(next_token(in));
    maxval = std::stoi(next_token(in));
  } catch (const std::exception&) {
    fail(ErrorCode::kMalformedHeader, "bad PGM header in '" + path.string() + "'");
  }
  if (img.width == 0 || img.height == 0 || maxval <= 0 || maxval > 255) {
    fail(ErrorCode::kMalformedHeader,
         "unsupported PGM geometry or maxval in '" + path.string() + "'");
  }
  img.pixels.resize(img.width * img.height);
  if (!in.read(reinterpret_cast<char*>(img.pixels.data()),
               static_cast<std::streamsize>(img.pixels.size()))) {
    fail(ErrorCode::kMalformedHeader, "truncated PGM payload in '" + path.string() + "'");
  }
  return img;
}

void write_pgm(const GrayImage& image, const std::filesystem::path& path) {
  check_image(image);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::kIo, "cannot write '" + path.string() + "'");
  out << "P5\n" << image.width << ' ' << image.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(image.pixels.data()),
            static_cast<std::streamsize>(image.pixels.size()));
}

Mask load_mask(const std::filesystem::path& path) {
  auto img = read_pgm(path);
  return Mask(img.width, img.height, std::move(img.pixels));
}

void save_mask(const Mask& mask, const std::filesystem::path& path) {
  GrayImage img{mask.width(), mask.height(), {}};
  img.pixels.reserve(mask.pixels().size());
  for (auto p : mask.pixels()) img.pixels.push_back(p ? 255 : 0);
  write_pgm(img, path);
}

}  // namespace scs
