#include "doctest.h"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "lpm/errors.hpp"
#include "lpm/io.hpp"
#include "lpm/rng.hpp"
#include "lpm/simulate.hpp"

namespace {

std::string temp_path(const std::string& stem) {
  return "/tmp/latentmle_io_test_" + stem;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

void spit(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  REQUIRE(out.good());
  out << content;
}

lpm::SimConfig small_sim() {
  lpm::SimConfig cfg;
  cfg.params.alpha = 1.0;
  cfg.params.beta = 1.0;
  cfg.params.sigma2 = 0.4;
  cfg.params.sigma_bar2 = 1.0;
  cfg.params.eps = 0.1;
  cfg.horizon_T = 40.0;
  cfg.dt_sim = 0.01;
  cfg.seed = 7;
  return cfg;
}

}  // namespace

TEST_CASE("shortest round-trip float formatting") {
  for (double x : {0.1, 1.0 / 3.0, 1e-300, 12345.678, -0.0, 2.5e17}) {
    std::string s = lpm::format_double(x);
    double back = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), back);
    REQUIRE(ec == std::errc());
    REQUIRE(ptr == s.data() + s.size());
    CHECK(back == x);
  }
}

TEST_CASE("dataset writes, reloads, and rewrites byte-identically") {
  lpm::SimConfig cfg = small_sim();
  lpm::MarketPath path = lpm::simulate_path(cfg);

  lpm::ConfigMap config = {{"seed", "7"}, {"horizon_T", "40"}};
  const std::string p1 = temp_path("roundtrip_a.csv");
  const std::string p2 = temp_path("roundtrip_b.csv");
  lpm::write_dataset(path, p1, config);

  lpm::TickFile ticks = lpm::load_ticks(p1);
  REQUIRE(ticks.records.size() == path.size());
  CHECK(ticks.has_latent);
  REQUIRE(ticks.comments.size() == 2);
  CHECK(ticks.comments[0].first == "seed");
  CHECK(ticks.comments[0].second == "7");

  // rebuild a MarketPath from the loaded rows and rewrite
  lpm::MarketPath again;
  again.dt_obs = path.dt_obs;
  again.latent.emplace();
  for (const auto& r : ticks.records) {
    again.times.push_back(r.timestamp);
    again.bid.push_back(r.bid);
    again.ask.push_back(r.ask);
    again.order_flow.push_back(r.order_flow);
    again.latent->push_back(r.latent);
  }
  lpm::write_dataset(again, p2, ticks.comments);
  CHECK(slurp(p1) == slurp(p2));
  std::remove(p1.c_str());
  std::remove(p2.c_str());
}

TEST_CASE("parser rejects malformed input with line numbers") {
  auto expect_error = [](const std::string& content, const char* what) {
    std::istringstream in(content);
    CHECK_THROWS_AS_MESSAGE(lpm::parse_ticks(in, "mem"), lpm::DataError, what);
  };

  const std::string good_header = "timestamp,bid,ask,order_flow\n";
  expect_error("time,bid,ask,flow\n1,1,2,0\n", "unrecognized header");
  expect_error(good_header + "1,1,2\n", "missing field");
  expect_error(good_header + "1,1,2,x\n", "bad number");
  expect_error(good_header + "1,1.5,2,0\n", "non-integer quote");
  expect_error(good_header + "1,3,2,0\n", "inverted quotes");
  expect_error(good_header + "2,1,2,0\n1,1,2,0\n", "time going backwards");
  expect_error(good_header + "1,1,2,0,9\n", "extra field");

  // the error message carries the file name and 1-based line number
  std::istringstream in(good_header + "1,1,2,0\n0.5,1,2,0\n");
  try {
    lpm::parse_ticks(in, "feed.csv");
    FAIL("expected a parse failure");
  } catch (const lpm::DataError& e) {
    std::string msg = e.what();
    CHECK(msg.find("feed.csv") != std::string::npos);
    CHECK(msg.find("3") != std::string::npos);
  }
}

TEST_CASE("missing input file raises a data error") {
  CHECK_THROWS_AS(lpm::load_ticks("/nonexistent/feed.csv"), lpm::DataError);
}

TEST_CASE("resampling carries the last observation forward") {
  lpm::TickFile ticks;
  // irregular times; values change between grid points
  const double ts[] = {0.0, 0.4, 1.7, 2.2, 5.9};
  const std::int64_t bids[] = {100, 101, 101, 102, 99};
  const double flows[] = {3.0, 3.5, 4.0, 2.0, 1.0};
  for (int i = 0; i < 5; ++i) {
    lpm::TickRecord r;
    r.timestamp = ts[i];
    r.bid = bids[i];
    r.ask = bids[i] + 1;
    r.order_flow = flows[i];
    ticks.records.push_back(r);
  }

  int gaps = -1;
  lpm::MarketPath path = lpm::resample(ticks, 1.0, 60.0, &gaps);
  REQUIRE(path.size() == 6);  // grid 0..5
  CHECK(gaps == 0);
  CHECK(path.times[0] == 0.0);
  // t=0: first tick; t=1: tick at 0.4; t=2: tick at 1.7; t=3..5: tick at 2.2
  const std::int64_t expect_bid[] = {100, 101, 101, 102, 102, 102};
  for (int i = 0; i < 6; ++i) CHECK(path.bid[i] == expect_bid[i]);
  // order flow rebased to zero at the first grid point
  CHECK(path.order_flow[0] == 0.0);
  CHECK(path.order_flow[1] == doctest::Approx(0.5));
  CHECK(path.order_flow[2] == doctest::Approx(1.0));
  CHECK(path.order_flow[3] == doctest::Approx(-1.0));
  CHECK(path.order_flow[5] == doctest::Approx(-1.0));

  // a gap beyond the threshold is counted
  lpm::TickRecord far;
  far.timestamp = 200.0;
  far.bid = 100;
  far.ask = 101;
  far.order_flow = 0.5;
  ticks.records.push_back(far);
  lpm::MarketPath path2 = lpm::resample(ticks, 1.0, 60.0, &gaps);
  CHECK(gaps == 1);
  CHECK(path2.size() == 201);
}

TEST_CASE("resampling needs at least two grid points") {
  lpm::TickFile ticks;
  lpm::TickRecord r;
  r.timestamp = 0.2;
  r.bid = 10;
  r.ask = 11;
  r.order_flow = 0.0;
  ticks.records.push_back(r);
  CHECK_THROWS_AS(lpm::resample(ticks, 1.0), lpm::DataError);
}

TEST_CASE("estimation result round-trips exactly") {
  lpm::EstimationResult r;
  r.sigma_bar2_hat = 0.9973214;
  r.Sigma_hat = 0.38638272374308097;
  r.m_blocks = 100;
  r.alpha2_hat = 1.0421;
  r.beta_hat = 0.97;
  r.sigma2_hat = 0.40123;
  r.eps_hat = 0.093;
  r.eps_clamped = false;
  r.excluded = 1234;
  r.ties = {17};
  r.runtime_seconds = 12.75;
  r.kernel_builds = 5321;
  r.filter_steps = 86198200;
  r.workers = 8;
  r.config = {{"input", "ticks.csv"}, {"resample_step", "1"}};

  lpm::RngStream rng(99, 0, 9);
  for (int i = 0; i < 10000; ++i) {
    lpm::MleResult::Row row;
    row.alpha2 = rng.next_u01() * 4.0;
    row.sigma2 = rng.next_u01();
    row.beta = rng.next_u01() * 2.0;
    row.loglik = (rng.next_u01() - 0.5) * 1e4;
    r.surface.push_back(row);
  }

  const std::string p1 = temp_path("result_a.txt");
  const std::string p2 = temp_path("result_b.txt");
  lpm::save_result(r, p1);

  lpm::EstimationResult back = lpm::load_result(p1);
  CHECK(back.sigma_bar2_hat == r.sigma_bar2_hat);
  CHECK(back.Sigma_hat == r.Sigma_hat);
  CHECK(back.m_blocks == r.m_blocks);
  CHECK(back.alpha2_hat == r.alpha2_hat);
  CHECK(back.beta_hat == r.beta_hat);
  CHECK(back.sigma2_hat == r.sigma2_hat);
  CHECK(back.eps_hat == r.eps_hat);
  CHECK(back.eps_clamped == r.eps_clamped);
  CHECK(back.excluded == r.excluded);
  CHECK(back.ties == r.ties);
  CHECK(back.runtime_seconds == r.runtime_seconds);
  CHECK(back.kernel_builds == r.kernel_builds);
  CHECK(back.filter_steps == r.filter_steps);
  CHECK(back.workers == r.workers);
  CHECK(back.config == r.config);
  REQUIRE(back.surface.size() == r.surface.size());
  for (std::size_t i = 0; i < r.surface.size(); ++i) {
    CHECK(back.surface[i].alpha2 == r.surface[i].alpha2);
    CHECK(back.surface[i].sigma2 == r.surface[i].sigma2);
    CHECK(back.surface[i].beta == r.surface[i].beta);
    CHECK(back.surface[i].loglik == r.surface[i].loglik);
  }

  lpm::save_result(back, p2);
  CHECK(slurp(p1) == slurp(p2));
  std::remove(p1.c_str());
  std::remove(p2.c_str());
}

TEST_CASE("result loader refuses other formats") {
  const std::string p = temp_path("result_bad.txt");

  spit(p, "# format=latentmle.result.v2\n");
  CHECK_THROWS_AS(lpm::load_result(p), lpm::DataError);

  spit(p, "timestamp,bid,ask,order_flow\n");
  CHECK_THROWS_AS(lpm::load_result(p), lpm::DataError);

  std::remove(p.c_str());
  CHECK_THROWS_AS(lpm::load_result(p), lpm::DataError);
}

TEST_CASE("config file loading") {
  const std::string p = temp_path("config.cfg");
  spit(p, "# comment line\ninput=ticks.csv\n\nresample_step=2.5\nthreads=4\n");
  lpm::ConfigMap cfg = lpm::load_config(p);
  REQUIRE(cfg.size() == 3);
  CHECK(cfg[0].first == "input");
  CHECK(cfg[0].second == "ticks.csv");
  CHECK(cfg[1].first == "resample_step");
  CHECK(cfg[1].second == "2.5");
  CHECK(cfg[2].first == "threads");
  CHECK(cfg[2].second == "4");
  std::remove(p.c_str());
}

TEST_CASE("dataset without latent column parses") {
  std::istringstream in(
      "timestamp,bid,ask,order_flow\n"
      "0,100,101,0\n"
      "1,100,102,0.25\n");
  lpm::TickFile ticks = lpm::parse_ticks(in, "mem");
  CHECK(!ticks.has_latent);
  REQUIRE(ticks.records.size() == 2);
  CHECK(ticks.records[1].ask == 102);
  CHECK(ticks.records[1].order_flow == doctest::Approx(0.25));
}
