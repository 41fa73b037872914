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

#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <thread>

#include "httplib.h"
#include "json.hpp"
#include "scs/error.hpp"
#include "scs/oracle.hpp"
#include "scs/remote_oracle.hpp"

namespace scs {
namespace {

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no scs::Error thrown";
  return ErrorCode::kInvalidArgument;
}

const std::map<std::string, int> kLabels{{"a", 0}, {"b", 0}, {"c", 1}, {"d", 2}};

TEST(SimulatedOracleTest, ClassMatchConstants) {
  const SimulatedOracle o(kLabels, SimulatedOracleConfig{});
  EXPECT_EQ(o.score("a", "b"), 0.8);
  EXPECT_EQ(o.score("a", "c"), 0.2);
  EXPECT_EQ(code_of([&] { o.score("a", "zz"); }), ErrorCode::kUnknownId);
}

TEST(SimulatedOracleTest, CosineSigmoid) {
  const FeatureSet set(2, {{"x", {1, 0}}, {"y", {2, 0}}, {"z", {-1, 0}}});
  SimulatedOracleConfig cfg;
  cfg.mode = SimulatedMode::kCosineSigmoid;
  const SimulatedOracle o(std::span<const FeatureSet>(&set, 1), cfg);
  EXPECT_NEAR(o.score("x", "y"), 0.7311, 1e-4);
  EXPECT_NEAR(o.score("x", "y"), 1.0 / (1.0 + std::exp(-1.0)), 1e-15);
  EXPECT_LT(o.score("x", "z"), o.score("x", "y"));
}

TEST(SimulatedOracleTest, NoiseIsPureAndClamped) {
  SimulatedOracleConfig cfg;
  cfg.noise_scale = 0.5;
  cfg.seed = 3;
  const SimulatedOracle o(kLabels, cfg);
  const SimulatedOracle twin(kLabels, cfg);
  bool varied = false;
  for (const auto& [q, _] : kLabels) {
    for (const auto& [c, __] : kLabels) {
      const double v = o.score(q, c);
      EXPECT_EQ(v, o.score(q, c));
      EXPECT_EQ(v, twin.score(q, c));
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 1.0);
      varied = varied || (v != 0.8 && v != 0.2);
    }
  }
  EXPECT_TRUE(varied);
}

TEST(SimulatedOracleTest, ModeMismatch) {
  SimulatedOracleConfig cfg;
  cfg.mode = SimulatedMode::kCosineSigmoid;
  EXPECT_EQ(code_of([&] { SimulatedOracle(kLabels, cfg); }), ErrorCode::kInvalidArgument);
  cfg = {};
  cfg.noise_scale = -1;
  EXPECT_EQ(code_of([&] { SimulatedOracle(kLabels, cfg); }), ErrorCode::kInvalidArgument);
}

TEST(ScoreBatchTest, Examples) {
  const MatrixOracle m({"q"}, {"one", "zero"}, {1.0, 0.0});
  const std::vector<std::string> both{"one", "zero"}, single{"one"};
  EXPECT_EQ(score_batch(m, "q", single).avg, 1.0);
  const auto rec = score_batch(m, "q", both);
  EXPECT_EQ(rec.avg, 0.5);
  EXPECT_EQ(rec.query_id, "q");
}

TEST(ScoreBatchTest, MatchesPairLoop) {
  SimulatedOracleConfig cfg;
  cfg.noise_scale = 0.1;
  const SimulatedOracle o(kLabels, cfg);
  const std::vector<std::string> ids{"d", "a", "c", "b"};
  const auto rec = score_batch(o, "a", ids);
  double sum = 0.0;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    EXPECT_EQ(rec.ious[i], score_pair(o, "a", ids[i]));
    sum += rec.ious[i];
  }
  EXPECT_NEAR(rec.avg, sum / 4.0, 1e-15);
}

TEST(ScoreBatchTest, ErrorNamesFailingCandidate) {
  const SimulatedOracle o(kLabels, SimulatedOracleConfig{});
  const std::vector<std::string> ids{"a", "ghost"};
  try {
    score_batch(o, "b", ids);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kOracle);
    EXPECT_NE(std::string(e.what()).find("ghost"), std::string::npos);
  }
}

TEST(RewardMeanTest, EqualValuesAreExact) {
  const std::vector<double> v(7, 0.1);
  EXPECT_EQ(reward_mean(v), 0.1);
  EXPECT_EQ(reward_mean(std::vector<double>{}), 0.0);
}

TEST(MatrixOracleTest, FileRoundTrip) {
  const MatrixOracle m({"q1", "q2"}, {"c1", "c2", "c3"}, {0.1, 0.2, 0.3, 0.4, 0.5, 1.0});
  std::stringstream buf;
  m.write(buf);
  EXPECT_EQ(buf.str().substr(0, 18), "query_id,c1,c2,c3\n");
  const auto back = MatrixOracle::read(buf);
  EXPECT_EQ(back.score("q2", "c3"), 1.0);
  EXPECT_EQ(back.score("q1", "c2"), 0.2);
  EXPECT_EQ(back.identity(), m.identity());
}

TEST(MatrixOracleTest, Errors) {
  EXPECT_EQ(code_of([] { MatrixOracle({"q"}, {"c"}, {1.5}); }), ErrorCode::kOutOfRange);
  EXPECT_EQ(code_of([] { MatrixOracle({"q"}, {"c", "c"}, {0, 0}); }), ErrorCode::kDuplicateId);
  EXPECT_EQ(code_of([] { MatrixOracle({"q"}, {"c"}, {0, 0}); }), ErrorCode::kShapeMismatch);
  std::istringstream ragged("query_id,a,b\nq,0.1\n");
  EXPECT_EQ(code_of([&] { MatrixOracle::read(ragged); }), ErrorCode::kDimensionMismatch);
  std::istringstream junk("query_id,a\nq,abc\n");
  EXPECT_EQ(code_of([&] { MatrixOracle::read(junk); }), ErrorCode::kMalformedHeader);
  EXPECT_EQ(code_of([] { MatrixOracle::load("/nonexistent/iou.csv"); }), ErrorCode::kIo);
  const MatrixOracle m({"q"}, {"c"}, {0.5});
  EXPECT_EQ(code_of([&] { m.score("x", "c"); }), ErrorCode::kUnknownId);
}

class CountingOracle : public Oracle {
 public:
  OracleCapabilities capabilities() const override { return {true, false}; }
  std::string identity() const override { return "counting"; }
  double score(const std::string& q, const std::string& c) const override {
    ++calls;
    return q == c ? 1.0 : 0.25;
  }
  mutable std::atomic<int> calls{0};
};

TEST(CachedOracleTest, MemoizesAndPersists) {
  auto inner = std::make_shared<CountingOracle>();
  CachedOracle cache(inner);
  const std::vector<std::string> ids{"a", "b", "c"};
  EXPECT_EQ(cache.score_many("a", ids), (std::vector<double>{1.0, 0.25, 0.25}));
  cache.score_many("a", ids);
  cache.score("a", "b");
  EXPECT_EQ(inner->calls.load(), 3);
  EXPECT_EQ(cache.miss_count(), 3u);

  const auto path = std::filesystem::temp_directory_path() / "scs_cache_test.csv";
  cache.save_sidecar(path);
  auto inner2 = std::make_shared<CountingOracle>();
  CachedOracle warm(inner2);
  warm.load_sidecar(path);
  EXPECT_EQ(warm.cached_count(), 3u);
  EXPECT_EQ(warm.score("a", "c"), 0.25);
  EXPECT_EQ(inner2->calls.load(), 0);
  std::filesystem::remove(path);
}

TEST(CachedOracleTest, IgnoresRowsOfOtherOracles) {
  const auto path = std::filesystem::temp_directory_path() / "scs_cache_other.csv";
  {
    std::ofstream out(path);
    out << "oracle,query_id,candidate_id,iou\nsomeone-else,a,b,0.9\n";
  }
  CachedOracle cache(std::make_shared<CountingOracle>());
  cache.load_sidecar(path);
  EXPECT_EQ(cache.cached_count(), 0u);
  EXPECT_EQ(cache.score("a", "b"), 0.25);
  std::filesystem::remove(path);
}

// In-process scoring service for RemoteOracle tests.
class FakeService {
 public:
  using Handler = std::function<void(const nlohmann::json&, httplib::Response&)>;

  explicit FakeService(Handler h) : handler_(std::move(h)) {
    server_.Post("/v1/score", [this](const httplib::Request& req, httplib::Response& res) {
      const int now = ++in_flight_;
      int seen = peak_.load();
      while (now > seen && !peak_.compare_exchange_weak(seen, now)) {
      }
      ++requests_;
      handler_(nlohmann::json::parse(req.body), res);
      --in_flight_;
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~FakeService() {
    server_.stop();
    thread_.join();
  }

  std::string endpoint() const { return "http://127.0.0.1:" + std::to_string(port_); }
  int requests() const { return requests_.load(); }
  int peak() const { return peak_.load(); }

 private:
  Handler handler_;
  httplib::Server server_;
  std::thread thread_;
  int port_ = 0;
  std::atomic<int> in_flight_{0}, peak_{0}, requests_{0};
};

void reply_by_length(const nlohmann::json& body, httplib::Response& res) {
  nlohmann::json out;
  out["ious"] = nlohmann::json::array();
  for (const auto& p : body.at("pairs")) {
    out["ious"].push_back(p.at("candidate_id").get<std::string>().size() / 10.0);
  }
  res.set_content(out.dump(), "application/json");
}

RemoteOracleConfig fast_config(const std::string& endpoint) {
  RemoteOracleConfig cfg;
  cfg.endpoint = endpoint;
  cfg.timeout = std::chrono::milliseconds(2000);
  cfg.retry_backoff = std::chrono::milliseconds(1);
  return cfg;
}

TEST(RemoteOracleTest, ScoresBatches) {
  FakeService svc(reply_by_length);
  const RemoteOracle o(fast_config(svc.endpoint()));
  const std::vector<std::string> ids{"a", "abc", "abcde"};
  const auto rec = score_batch(o, "q", ids);
  EXPECT_EQ(rec.ious, (std::vector<double>{0.1, 0.3, 0.5}));
  EXPECT_EQ(svc.requests(), 1);
  EXPECT_DOUBLE_EQ(o.score("q", "ab"), 0.2);
  EXPECT_TRUE(o.capabilities().batched);
}

TEST(RemoteOracleTest, RetriesServerErrors) {
  std::atomic<int> failures{2};
  FakeService svc([&](const nlohmann::json& body, httplib::Response& res) {
    if (failures-- > 0) {
      res.status = 503;
      return;
    }
    reply_by_length(body, res);
  });
  const RemoteOracle o(fast_config(svc.endpoint()));
  EXPECT_DOUBLE_EQ(o.score("q", "abcd"), 0.4);
  EXPECT_EQ(o.attempts(), 3u);
}

TEST(RemoteOracleTest, GivesUpAfterRetryLimit) {
  FakeService svc([](const nlohmann::json&, httplib::Response& res) { res.status = 500; });
  auto cfg = fast_config(svc.endpoint());
  cfg.max_retries = 2;
  const RemoteOracle o(cfg);
  const std::vector<std::string> ids{"c1"};
  try {
    score_batch(o, "q7", ids);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kTransport);
    EXPECT_NE(std::string(e.what()).find("q7"), std::string::npos);
  }
  EXPECT_EQ(svc.requests(), 3);
}

TEST(RemoteOracleTest, ClientErrorsAreNotRetried) {
  FakeService svc([](const nlohmann::json&, httplib::Response& res) { res.status = 400; });
  const RemoteOracle o(fast_config(svc.endpoint()));
  EXPECT_EQ(code_of([&] { o.score("q", "c"); }), ErrorCode::kTransport);
  EXPECT_EQ(svc.requests(), 1);
}

TEST(RemoteOracleTest, RejectsBadBodies) {
  FakeService out_of_range([](const nlohmann::json&, httplib::Response& res) {
    res.set_content(R"({"ious": [1.5]})", "application/json");
  });
  EXPECT_EQ(code_of([&] { RemoteOracle(fast_config(out_of_range.endpoint())).score("q", "c"); }),
            ErrorCode::kOutOfRange);

  FakeService malformed([](const nlohmann::json&, httplib::Response& res) {
    res.set_content("not json", "text/plain");
  });
  EXPECT_EQ(code_of([&] { RemoteOracle(fast_config(malformed.endpoint())).score("q", "c"); }),
            ErrorCode::kTransport);

  FakeService short_reply([](const nlohmann::json&, httplib::Response& res) {
    res.set_content(R"({"ious": []})", "application/json");
  });
  EXPECT_EQ(code_of([&] { RemoteOracle(fast_config(short_reply.endpoint())).score("q", "c"); }),
            ErrorCode::kTransport);
}

TEST(RemoteOracleTest, TimesOut) {
  FakeService slow([](const nlohmann::json& body, httplib::Response& res) {
    std::this_thread::sleep_for(std::chrono::milliseconds(300));
    reply_by_length(body, res);
  });
  auto cfg = fast_config(slow.endpoint());
  cfg.timeout = std::chrono::milliseconds(50);
  cfg.max_retries = 1;
  const RemoteOracle o(cfg);
  EXPECT_EQ(code_of([&] { o.score("q", "c"); }), ErrorCode::kTransport);
  EXPECT_EQ(o.attempts(), 2u);
}

TEST(RemoteOracleTest, UnreachableEndpoint) {
  auto cfg = fast_config("http://127.0.0.1:1");
  cfg.max_retries = 1;
  EXPECT_EQ(code_of([&] { RemoteOracle(cfg).score("q", "c"); }), ErrorCode::kTransport);
}

TEST(RemoteOracleTest, BoundsConcurrentRequests) {
  FakeService svc([](const nlohmann::json& body, httplib::Response& res) {
    std::this_thread::sleep_for(std::chrono::milliseconds(20));
    reply_by_length(body, res);
  });
  auto cfg = fast_config(svc.endpoint());
  cfg.max_in_flight = 2;
  const RemoteOracle o(cfg);
  std::vector<std::thread> workers;
  for (int i = 0; i < 8; ++i) workers.emplace_back([&] { o.score("q", "c"); });
  for (auto& t : workers) t.join();
  EXPECT_EQ(svc.requests(), 8);
  EXPECT_LE(svc.peak(), 2);
}

TEST(RemoteOracleTest, ConfigErrors) {
  EXPECT_EQ(code_of([] { RemoteOracle(RemoteOracleConfig{}); }), ErrorCode::kInvalidArgument);
  auto cfg = fast_config("http://127.0.0.1:9");
  cfg.max_in_flight = 0;
  EXPECT_EQ(code_of([&] { RemoteOracle{cfg}; }), ErrorCode::kInvalidArgument);
}

}  // namespace
}  // namespace scs
