#include <gtest/gtest.h>

#include <string>

#include "renyi/config.hpp"

using namespace renyi;

namespace {

const std::string base = R"({
  "geometry": {"kind": "Torus1D", "N": 64},
  "flow": {"p": 2},
  "initial": "sine-bump:0.5",
  "time": {"t1": 0.01}
})";

json doc() { return json::parse(base); }

std::string error_path(const json& j) {
  try {
    parse_config(j);
  } catch (const ConfigError& e) {
    return e.path();
  }
  return "<none>";
}

}  // namespace

TEST(Config, Defaults) {
  const auto c = parse_config(doc());
  EXPECT_EQ(c.geometry.geometry_kind(), GeometryKind::Torus1D);
  EXPECT_EQ(c.m_value(), 1.0);
  EXPECT_EQ(c.t0, 0.0);
  EXPECT_NEAR(c.sample_every, 1e-5, 1e-20);
  EXPECT_EQ(c.time_origin, 0.0);
  EXPECT_NEAR(c.min_tau, 5e-4, 1e-18);
  EXPECT_TRUE(c.checks.empty());
  EXPECT_EQ(c.front_fraction, 0.0);
  EXPECT_EQ(c.positivity_floor, 1e-10);
  EXPECT_EQ(c.inequalities.count, 100);
}

TEST(Config, BarenblattDefaults) {
  auto j = doc();
  j["initial"] = "barenblatt";
  j["geometry"]["extent"] = {-4, 4};
  j["time"]["t1"] = 2;
  const auto c = parse_config(j);
  EXPECT_EQ(c.t0, 1.0);
  EXPECT_EQ(c.time_origin, 0.0);
  EXPECT_EQ(c.min_tau, 0.0);
  EXPECT_EQ(c.front_fraction, 0.1);
  EXPECT_TRUE(c.barenblatt());
}

TEST(Config, ErrorPaths) {
  auto j = doc();
  j["flow"]["p"] = -1;  // p = 1 - 2/m
  EXPECT_EQ(error_path(j), "flow.p");
  j = doc();
  j["flow"]["p"] = 1;
  EXPECT_EQ(error_path(j), "flow.p");
  j = doc();
  j["checks"] = {"mass", "bogus"};
  EXPECT_EQ(error_path(j), "checks[1]");
  j = doc();
  j["checks"] = {"barenblatt_oracle"};
  EXPECT_EQ(error_path(j), "checks[0]");
  j = doc();
  j["initial"] = "sine-bump:1.5";
  EXPECT_EQ(error_path(j), "initial");
  j = doc();
  j["initial"] = "wave";
  EXPECT_EQ(error_path(j), "initial");
  j = doc();
  j["geometry"]["kind"] = "Klein";
  EXPECT_EQ(error_path(j), "geometry.kind");
  j = doc();
  j["sweep"] = {{"axis", "N"}, {"values", {128, 3}}};
  EXPECT_EQ(error_path(j), "sweep.values[1]");
  j = doc();
  j["time"]["sample_every"] = 0.003;
  EXPECT_EQ(error_path(j), "time.sample_every");
  j = doc();
  j["tolerances"] = {{"nonsense", 1}};
  EXPECT_EQ(error_path(j), "tolerances.nonsense");
  j = doc();
  j["flow"]["extra"] = 1;
  EXPECT_EQ(error_path(j), "flow.extra");
  j = doc();
  j["geometry"] = {{"kind", "WeightedInterval"}, {"N", 64}, {"phi", "quadratic:1"}};
  EXPECT_EQ(error_path(j), "flow.m");
  j = doc();
  j.erase("time");
  EXPECT_EQ(error_path(j), "time");
}

TEST(Config, BarenblattNeedsTorus) {
  auto j = doc();
  j["initial"] = "barenblatt";
  j["time"]["t1"] = 2;
  j["geometry"]["kind"] = "ZonalSphere";
  EXPECT_EQ(error_path(j), "initial");
}

TEST(Config, Tolerances) {
  auto j = doc();
  j["tolerances"] = {{"d2Np_identity", 1e-2}, {"inequality_extremal", 1e-5}};
  const auto c = parse_config(j);
  EXPECT_EQ(c.tolerances.thm5, 1e-2);
  EXPECT_EQ(c.tolerances.inequality_extremal, 1e-5);
  const auto t = tolerances_to_json(c.tolerances);
  EXPECT_EQ(t["d2Np_identity"].get<double>(), 1e-2);
}

TEST(Config, ChecksAllAndText) {
  auto j = doc();
  j["checks"] = "all";
  EXPECT_TRUE(parse_config(j).checks.empty());
  EXPECT_THROW(parse_config_text("{not json"), ConfigError);
  EXPECT_THROW(load_config("/nonexistent/config.json"), ConfigError);
}

TEST(Config, BundledConfigsLoad) {
  for (const char* name : {"constant", "torus1d-p2", "torus2d-p2", "weighted-m3-p1.2", "sphere-p1.5",
                           "scaled-torus-p2", "fde-torus1d-p0.9", "random-sphere-p2", "barenblatt-n1-p2",
                           "sweep-N-torus1d", "sweep-p-torus1d", "sweep-K-weighted", "gns-check"})
    EXPECT_NO_THROW(load_config(std::string(RENYI_CONFIG_DIR) + "/" + name + ".json")) << name;
}
