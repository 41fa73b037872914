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

#include "scs/features.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "io_util.hpp"
#include "scs/error.hpp"
#include "scs/rng.hpp"

namespace scs {

namespace {

constexpr char kMagic[4] = {'S', 'C', 'S', 'F'};
constexpr std::uint32_t kVersion = 1;

void check_finite(const FeatureVector& v) {
  for (double x : v.values) {
    if (!std::isfinite(x)) {
      fail(ErrorCode::kNonFinite, "feature '" + v.id + "' has a non-finite value");
    }
  }
}

}  // namespace

FeatureSet::FeatureSet(std::size_t dim, std::vector<FeatureVector> items, bool normalized)
    : dim_(dim), items_(std::move(items)), normalized_(normalized) {
  if (dim_ == 0) fail(ErrorCode::kInvalidArgument, "feature dimension must be >= 1");
  index_.reserve(items_.size());
  for (std::size_t i = 0; i < items_.size(); ++i) {
    const auto& item = items_[i];
    if (item.values.size() != dim_) {
      fail(ErrorCode::kDimensionMismatch, "feature '" + item.id + "' has " +
                                              std::to_string(item.values.size()) +
                                              " values, expected " + std::to_string(dim_));
    }
    check_finite(item);
    if (!index_.emplace(item.id, i).second) {
      fail(ErrorCode::kDuplicateId, "duplicate feature id '" + item.id + "'");
    }
    if (normalized_ && std::abs(l2_norm(item.values) - 1.0) > 1e-6) {
      fail(ErrorCode::kInvalidArgument,
           "feature '" + item.id + "' is flagged normalized but is not unit length");
    }
  }
}

std::optional<std::size_t> FeatureSet::index_of(const std::string& id) const {
  auto it = index_.find(id);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

const FeatureVector& FeatureSet::at(const std::string& id) const {
  auto it = index_.find(id);
  if (it == index_.end()) fail(ErrorCode::kUnknownId, "no feature with id '" + id + "'");
  return items_[it->second];
}

FeatureSet FeatureSet::subset(std::span<const std::string> ids) const {
  std::vector<FeatureVector> out;
  out.reserve(ids.size());
  for (const auto& id : ids) out.push_back(at(id));
  return FeatureSet(dim_, std::move(out), normalized_);
}

std::vector<std::string> FeatureSet::ids() const {
  std::vector<std::string> out;
  out.reserve(items_.size());
  for (const auto& item : items_) out.push_back(item.id);
  return out;
}

FeatureFormat format_from_path(const std::filesystem::path& path) {
  auto ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return ext == ".csv" ? FeatureFormat::kCsv : FeatureFormat::kBinary;
}

void write_scsf(std::ostream& out, const FeatureSet& set) {
  if (set.size() > std::numeric_limits<std::uint32_t>::max()) {
    fail(ErrorCode::kInvalidArgument, "too many features for SCSF");
  }
  out.write(kMagic, 4);
  detail::write_le<std::uint32_t>(out, kVersion);
  detail::write_le<std::uint32_t>(out, static_cast<std::uint32_t>(set.size()));
  detail::write_le<std::uint32_t>(out, static_cast<std::uint32_t>(set.dim()));
  for (const auto& item : set) {
    for (double x : item.values) {
      const auto f = static_cast<float>(x);
      if (!std::isfinite(f)) {
        fail(ErrorCode::kNonFinite, "feature '" + item.id + "' overflows f32");
      }
      detail::write_le<float>(out, f);
    }
  }
  for (const auto& item : set) {
    if (item.id.size() > std::numeric_limits<std::uint16_t>::max()) {
      fail(ErrorCode::kInvalidArgument, "feature id longer than 65535 bytes");
    }
    detail::write_le<std::uint16_t>(out, static_cast<std::uint16_t>(item.id.size()));
    out.write(item.id.data(), static_cast<std::streamsize>(item.id.size()));
  }
}

FeatureSet read_scsf(std::istream& in) {
  char magic[4];
  if (!in.read(magic, 4) || !std::equal(magic, magic + 4, kMagic)) {
    fail(ErrorCode::kMalformedHeader, "missing SCSF magic");
  }
  std::uint32_t version = 0, n = 0, d = 0;
  if (!detail::read_le(in, version) || !detail::read_le(in, n) || !detail::read_le(in, d)) {
    fail(ErrorCode::kMalformedHeader, "truncated SCSF header");
  }
  if (version != kVersion) {
    fail(ErrorCode::kMalformedHeader, "unsupported SCSF version " + std::to_string(version));
  }
  if (d == 0) fail(ErrorCode::kMalformedHeader, "SCSF dimension is zero");

  std::vector<FeatureVector> items(n);
  for (auto& item : items) {
    item.values.resize(d);
    for (auto& x : item.values) {
      float f = 0.0f;
      if (!detail::read_le(in, f)) fail(ErrorCode::kMalformedHeader, "truncated SCSF payload");
      x = f;
    }
  }
  for (auto& item : items) {
    std::uint16_t len = 0;
    if (!detail::read_le(in, len)) fail(ErrorCode::kMalformedHeader, "truncated SCSF id table");
    item.id.resize(len);
    if (len > 0 && !in.read(item.id.data(), len)) {
      fail(ErrorCode::kMalformedHeader, "truncated SCSF id record");
    }
  }
  return FeatureSet(d, std::move(items));
}

FeatureSet read_features_csv(std::istream& in) {
  std::vector<FeatureVector> items;
  std::size_t dim = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto view = detail::trim(line);
    if (view.empty()) continue;
    auto fields = detail::split(view, ',');
    if (fields.size() < 2) {
      fail(ErrorCode::kMalformedHeader,
           "line " + std::to_string(line_no) + ": expected id and at least one value");
    }
    const std::size_t row_dim = fields.size() - 1;
    if (dim == 0) {
      dim = row_dim;
    } else if (row_dim != dim) {
      fail(ErrorCode::kDimensionMismatch, "line " + std::to_string(line_no) + " has " +
                                              std::to_string(row_dim) + " values, expected " +
                                              std::to_string(dim));
    }
    FeatureVector v;
    v.id = std::string(detail::trim(fields[0]));
    v.values.resize(row_dim);
    for (std::size_t j = 0; j < row_dim; ++j) {
      if (!detail::parse_double(fields[j + 1], v.values[j])) {
        const auto field = detail::trim(fields[j + 1]);
        // from_chars accepts "nan"/"inf"; report those as non-finite.
        double probe = 0.0;
        auto [p, ec] = std::from_chars(field.data(), field.data() + field.size(), probe);
        (void)p;
        if (ec == std::errc::result_out_of_range) {
          fail(ErrorCode::kNonFinite, "line " + std::to_string(line_no) + ": value out of range");
        }
        fail(ErrorCode::kMalformedHeader,
             "line " + std::to_string(line_no) + ": cannot parse '" + std::string(field) + "'");
      }
    }
    items.push_back(std::move(v));
  }
  if (items.empty()) {
    fail(ErrorCode::kMalformedHeader, "CSV feature file has no rows");
  }
  return FeatureSet(dim, std::move(items));
}

void write_features_csv(std::ostream& out, const FeatureSet& set) {
  for (const auto& item : set) {
    if (item.id.find_first_of(",\n\r") != std::string::npos) {
      fail(ErrorCode::kInvalidArgument, "id '" + item.id + "' cannot be stored in CSV");
    }
    out << item.id;
    for (double x : item.values) out << ',' << detail::format_double(x);
    out << '\n';
  }
}

FeatureSet load_features(const std::filesystem::path& path, FeatureFormat format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIo, "cannot open '" + path.string() + "'");
  return format == FeatureFormat::kBinary ? read_scsf(in) : read_features_csv(in);
}

void save_features(const FeatureSet& set, const std::filesystem::path& path, FeatureFormat format) {
  std::ostringstream buf(std::ios::binary);
  if (format == FeatureFormat::kBinary) {
    write_scsf(buf, set);
  } else {
    write_features_csv(buf, set);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::kIo, "cannot write '" + path.string() + "'");
  const auto bytes = buf.str();
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) fail(ErrorCode::kIo, "write failed for '" + path.string() + "'");
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double l2_norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

double squared_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double t = a[i] - b[i];
    s += t * t;
  }
  return s;
}

FeatureSet l2_normalize(const FeatureSet& set) {
  std::vector<FeatureVector> out;
  out.reserve(set.size());
  for (const auto& item : set) {
    const double norm = l2_norm(item.values);
    if (!(norm >= 1e-12)) {
      fail(ErrorCode::kZeroNorm, "cannot normalize feature '" + item.id + "'");
    }
    FeatureVector v{item.id, item.values};
    for (auto& x : v.values) x /= norm;
    out.push_back(std::move(v));
  }
  return FeatureSet(set.dim(), std::move(out), true);
}

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    fail(ErrorCode::kDimensionMismatch, "cosine_similarity of vectors with dims " +
                                            std::to_string(a.size()) + " and " +
                                            std::to_string(b.size()));
  }
  const double na = l2_norm(a);
  const double nb = l2_norm(b);
  if (na == 0.0 || nb == 0.0) fail(ErrorCode::kZeroNorm, "cosine_similarity of a zero vector");
  return std::clamp(dot(a, b) / (na * nb), -1.0, 1.0);
}

double cosine_similarity(const FeatureVector& a, const FeatureVector& b) {
  return cosine_similarity(std::span<const double>(a.values), std::span<const double>(b.values));
}

std::string synthetic_id(std::size_t cls, std::size_t index) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "c%03zu_s%05zu", cls, index);
  return buf;
}

SyntheticWorld generate_synthetic(const SyntheticWorldConfig& cfg) {
  if (cfg.num_classes == 0 || cfg.samples_per_class == 0 || cfg.dim == 0) {
    fail(ErrorCode::kInvalidArgument, "synthetic world sizes must be positive");
  }
  if (!(cfg.noise_scale >= 0.0) || !std::isfinite(cfg.noise_scale)) {
    fail(ErrorCode::kInvalidArgument, "noise_scale must be finite and >= 0");
  }
  Rng rng(cfg.seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  std::vector<std::vector<double>> prototypes(cfg.num_classes, std::vector<double>(cfg.dim));
  for (auto& proto : prototypes) {
    for (auto& x : proto) x = normal(rng);
  }

  SyntheticWorld world;
  std::vector<FeatureVector> items;
  items.reserve(cfg.num_classes * cfg.samples_per_class);
  for (std::size_t c = 0; c < cfg.num_classes; ++c) {
    for (std::size_t i = 0; i < cfg.samples_per_class; ++i) {
      FeatureVector v{synthetic_id(c, i), std::vector<double>(cfg.dim)};
      for (std::size_t j = 0; j < cfg.dim; ++j) {
        const double x = prototypes[c][j] + cfg.noise_scale * normal(rng);
        v.values[j] = static_cast<double>(static_cast<float>(x));
      }
      world.labels.emplace(v.id, static_cast<int>(c));
      items.push_back(std::move(v));
    }
  }
  world.features = FeatureSet(cfg.dim, std::move(items));
  return world;
}

}  // namespace scs
