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

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace scs {

/// Binary segmentation mask, row-major, 1 = foreground.
class Mask {
 public:
  Mask() = default;
  Mask(std::size_t width, std::size_t height);
  Mask(std::size_t width, std::size_t height, std::vector<std::uint8_t> pixels);

  std::size_t width() const noexcept { return width_; }
  std::size_t height() const noexcept { return height_; }
  std::span<const std::uint8_t> pixels() const noexcept { return pixels_; }

  bool at(std::size_t x, std::size_t y) const { return pixels_[y * width_ + x] != 0; }
  void set(std::size_t x, std::size_t y, bool fg) { pixels_[y * width_ + x] = fg ? 1 : 0; }

  std::size_t foreground_count() const noexcept;
  Mask complement() const;

 private:
  std::size_t width_ = 0;
  std::size_t height_ = 0;
  std::vector<std::uint8_t> pixels_;
};

struct GrayImage {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<std::uint8_t> pixels;

  static GrayImage filled(std::size_t width, std::size_t height, std::uint8_t value);
};

/// |pred & gt| / |pred | gt|. Two empty masks agree perfectly (1.0).
double iou(const Mask& pred, const Mask& gt);

struct LabeledMaskPair {
  Mask pred;
  Mask gt;
  int label = 0;
};

struct MaskPair {
  Mask pred;
  Mask gt;
};

/// Mean over classes of the per-class mean IoU.
double miou(std::span<const LabeledMaskPair> pairs);

/// Average of the mean foreground IoU and the mean background IoU, the latter
/// measured on complemented masks.
double fbiou(std::span<const MaskPair> pairs);

struct PsnrResult {
  // True when the images are identical; db is then +infinity.
  bool identical = false;
  double db = 0.0;
};

PsnrResult psnr(const GrayImage& a, const GrayImage& b);

/// Single-scale SSIM over uniform 8x8 windows with stride 1,
/// C1 = (0.01*255)^2, C2 = (0.03*255)^2, averaged over all windows.
double ssim(const GrayImage& a, const GrayImage& b);

inline constexpr std::size_t kSsimWindow = 8;

// Binary PGM (P5, maxval <= 255).
GrayImage read_pgm(const std::filesystem::path& path);
void write_pgm(const GrayImage& image, const std::filesystem::path& path);
/// Nonzero pixels become foreground.
Mask load_mask(const std::filesystem::path& path);
void save_mask(const Mask& mask, const std::filesystem::path& path);

}  // namespace scs
