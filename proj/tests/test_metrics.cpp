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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>

#include "scs/error.hpp"
#include "scs/metrics.hpp"
#include "support/reference.hpp"

namespace scs {
namespace {

Mask from_points(std::size_t w, std::size_t h, std::vector<std::pair<int, int>> pts) {
  Mask m(w, h);
  for (auto [x, y] : pts) m.set(x, y, true);
  return m;
}

// Direct double loop over every window; no running sums.
double ref_ssim(const GrayImage& a, const GrayImage& b) {
  const double c1 = std::pow(0.01 * 255, 2), c2 = std::pow(0.03 * 255, 2);
  const std::size_t k = kSsimWindow;
  double total = 0.0;
  std::size_t windows = 0;
  for (std::size_t y0 = 0; y0 + k <= a.height; ++y0) {
    for (std::size_t x0 = 0; x0 + k <= a.width; ++x0) {
      double ma = 0, mb = 0;
      for (std::size_t y = y0; y < y0 + k; ++y) {
        for (std::size_t x = x0; x < x0 + k; ++x) {
          ma += a.pixels[y * a.width + x];
          mb += b.pixels[y * b.width + x];
        }
      }
      ma /= k * k;
      mb /= k * k;
      double va = 0, vb = 0, cov = 0;
      for (std::size_t y = y0; y < y0 + k; ++y) {
        for (std::size_t x = x0; x < x0 + k; ++x) {
          const double da = a.pixels[y * a.width + x] - ma, db = b.pixels[y * b.width + x] - mb;
          va += da * da;
          vb += db * db;
          cov += da * db;
        }
      }
      va /= k * k;
      vb /= k * k;
      cov /= k * k;
      total += ((2 * ma * mb + c1) * (2 * cov + c2)) / ((ma * ma + mb * mb + c1) * (va + vb + c2));
      ++windows;
    }
  }
  return total / static_cast<double>(windows);
}

GrayImage random_image(std::size_t w, std::size_t h, std::mt19937_64& rng) {
  GrayImage img{w, h, std::vector<std::uint8_t>(w * h)};
  for (auto& p : img.pixels) p = static_cast<std::uint8_t>(rng() % 256);
  return img;
}

TEST(IouTest, Examples) {
  const auto a = from_points(2, 2, {{0, 0}, {1, 1}});
  EXPECT_EQ(iou(a, a), 1.0);
  EXPECT_EQ(iou(a, a.complement()), 0.0);
  EXPECT_EQ(iou(Mask(3, 3), Mask(3, 3)), 1.0);
  const auto pred = from_points(2, 2, {{0, 0}, {0, 1}});
  const auto gt = from_points(2, 2, {{0, 1}, {1, 1}});
  EXPECT_DOUBLE_EQ(iou(pred, gt), 1.0 / 3.0);
  EXPECT_THROW(iou(Mask(2, 2), Mask(2, 3)), Error);
}

TEST(IouTest, MatchesPixelCounting) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> density(0.0, 1.0);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto a = testing::random_mask(16, 16, rng, density(rng));
    const auto b = testing::random_mask(16, 16, rng, density(rng));
    EXPECT_EQ(iou(a, b), testing::ref_iou(a, b));
  }
}

TEST(MaskTest, ComplementAndCount) {
  std::mt19937_64 rng(2);
  const auto m = testing::random_mask(5, 7, rng);
  const auto c = m.complement();
  EXPECT_EQ(m.foreground_count() + c.foreground_count(), 35u);
  const auto ref = testing::ref_complement(m);
  EXPECT_TRUE(std::equal(c.pixels().begin(), c.pixels().end(), ref.pixels().begin()));
  EXPECT_THROW(Mask(0, 3), Error);
  EXPECT_THROW(Mask(2, 2, {1, 0, 1}), Error);
}

TEST(MiouTest, Examples) {
  const auto full = from_points(1, 1, {{0, 0}});
  const std::vector<LabeledMaskPair> one{{full, full, 3}};
  EXPECT_EQ(miou(one), 1.0);

  // Class 0 mean 0.4 from two pairs (0.8, 0.0); class 1 mean 0.6.
  const auto m5 = from_points(5, 1, {{0, 0}, {1, 0}, {2, 0}, {3, 0}, {4, 0}});
  const auto m4 = from_points(5, 1, {{0, 0}, {1, 0}, {2, 0}, {3, 0}});
  const auto m3 = from_points(5, 1, {{0, 0}, {1, 0}, {2, 0}});
  const auto other = from_points(5, 1, {{4, 0}});
  const std::vector<LabeledMaskPair> two{{m4, m5, 0}, {other, m3, 0}, {m3, m5, 1}};
  EXPECT_NEAR(miou(two), 0.5, 1e-15);
  EXPECT_THROW(miou(std::vector<LabeledMaskPair>{}), Error);
}

TEST(MiouTest, MatchesTwoLevelAverage) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<LabeledMaskPair> pairs;
    std::map<int, std::pair<double, int>> per_class;
    const std::size_t n = 1 + rng() % 8;
    for (std::size_t i = 0; i < n; ++i) {
      LabeledMaskPair p{testing::random_mask(16, 16, rng), testing::random_mask(16, 16, rng),
                        static_cast<int>(rng() % 3)};
      auto& acc = per_class[p.label];
      acc.first += testing::ref_iou(p.pred, p.gt);
      ++acc.second;
      pairs.push_back(std::move(p));
    }
    double expected = 0.0;
    for (const auto& [label, acc] : per_class) expected += acc.first / acc.second;
    expected /= static_cast<double>(per_class.size());
    EXPECT_NEAR(miou(pairs), expected, 1e-15);
  }
}

TEST(FbiouTest, Examples) {
  std::mt19937_64 rng(4);
  std::vector<MaskPair> same;
  for (int i = 0; i < 3; ++i) {
    const auto m = testing::random_mask(4, 4, rng);
    same.push_back({m, m});
  }
  EXPECT_EQ(fbiou(same), 1.0);
  const auto half = from_points(2, 2, {{0, 0}, {1, 0}});
  const std::vector<MaskPair> inverted{{half.complement(), half}};
  EXPECT_EQ(fbiou(inverted), 0.0);
  EXPECT_THROW(fbiou(std::vector<MaskPair>{}), Error);
}

TEST(FbiouTest, MatchesExplicitComplements) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<MaskPair> pairs;
    double fg = 0.0, bg = 0.0;
    const std::size_t n = 1 + rng() % 4;
    for (std::size_t i = 0; i < n; ++i) {
      MaskPair p{testing::random_mask(16, 16, rng), testing::random_mask(16, 16, rng)};
      fg += testing::ref_iou(p.pred, p.gt);
      bg += testing::ref_iou(testing::ref_complement(p.pred), testing::ref_complement(p.gt));
      pairs.push_back(std::move(p));
    }
    EXPECT_NEAR(fbiou(pairs), (fg / n + bg / n) / 2.0, 1e-15);
  }
}

TEST(PsnrTest, Examples) {
  const auto black = GrayImage::filled(1, 1, 0);
  const auto r = psnr(black, black);
  EXPECT_TRUE(r.identical);
  EXPECT_TRUE(std::isinf(r.db));
  EXPECT_NEAR(psnr(black, GrayImage::filled(1, 1, 255)).db, 0.0, 1e-12);
  EXPECT_NEAR(psnr(black, GrayImage::filled(1, 1, 51)).db, 10.0 * std::log10(25.0), 1e-12);
  EXPECT_NEAR(psnr(black, GrayImage::filled(1, 1, 51)).db, 13.98, 1e-2);
  EXPECT_FALSE(psnr(black, GrayImage::filled(1, 1, 1)).identical);
  EXPECT_THROW(psnr(black, GrayImage::filled(2, 1, 0)), Error);
}

TEST(SsimTest, Examples) {
  std::mt19937_64 rng(6);
  const auto img = random_image(12, 9, rng);
  EXPECT_EQ(ssim(img, img), 1.0);
  EXPECT_EQ(ssim(GrayImage::filled(8, 8, 100), GrayImage::filled(8, 8, 100)), 1.0);
  const double c1 = std::pow(0.01 * 255, 2);
  const double closed = c1 / (255.0 * 255.0 + c1);
  EXPECT_NEAR(ssim(GrayImage::filled(10, 10, 0), GrayImage::filled(10, 10, 255)), closed, 1e-6);
  EXPECT_NEAR(closed, 1.0e-4, 1e-6);
  EXPECT_THROW(ssim(GrayImage::filled(7, 8, 0), GrayImage::filled(7, 8, 0)), Error);
  EXPECT_THROW(ssim(GrayImage::filled(8, 8, 0), GrayImage::filled(9, 8, 0)), Error);
}

TEST(SsimTest, MatchesDirectWindowLoop) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t w = 8 + rng() % 10, h = 8 + rng() % 10;
    const auto a = random_image(w, h, rng);
    auto b = a;
    for (auto& p : b.pixels)
      p = static_cast<std::uint8_t>(std::clamp<int>(p + static_cast<int>(rng() % 41) - 20, 0, 255));
    EXPECT_NEAR(ssim(a, b), ref_ssim(a, b), 1e-12);
  }
}

TEST(PgmTest, RoundTrip) {
  std::mt19937_64 rng(8);
  const auto dir = std::filesystem::temp_directory_path();
  const auto img = random_image(13, 6, rng);
  write_pgm(img, dir / "scs_img.pgm");
  const auto back = read_pgm(dir / "scs_img.pgm");
  EXPECT_EQ(back.width, 13u);
  EXPECT_EQ(back.height, 6u);
  EXPECT_EQ(back.pixels, img.pixels);

  const auto mask = testing::random_mask(9, 4, rng);
  save_mask(mask, dir / "scs_mask.pgm");
  const auto mback = load_mask(dir / "scs_mask.pgm");
  EXPECT_EQ(iou(mask, mback), 1.0);
  EXPECT_EQ(mask.foreground_count(), mback.foreground_count());
  std::filesystem::remove(dir / "scs_img.pgm");
  std::filesystem::remove(dir / "scs_mask.pgm");
}

TEST(PgmTest, HeaderWithComment) {
  const auto path = std::filesystem::temp_directory_path() / "scs_comment.pgm";
  {
    std::ofstream out(path, std::ios::binary);
    out << "P5\n# made by hand\n2 1\n255\n";
    out.put(0).put(7);
  }
  const auto m = load_mask(path);
  EXPECT_FALSE(m.at(0, 0));
  EXPECT_TRUE(m.at(1, 0));
  std::filesystem::remove(path);
}

TEST(PgmTest, Malformed) {
  const auto path = std::filesystem::temp_directory_path() / "scs_bad.pgm";
  {
    std::ofstream out(path, std::ios::binary);
    out << "P2\n2 2\n255\n0 0 0 0\n";
  }
  EXPECT_THROW(read_pgm(path), Error);
  {
    std::ofstream out(path, std::ios::binary);
    out << "P5\n4 4\n255\n";
    out.put(1);
  }
  EXPECT_THROW(read_pgm(path), Error);
  std::filesystem::remove(path);
  EXPECT_THROW(read_pgm("/nonexistent/x.pgm"), Error);
}

}  // namespace
}  // namespace scs
