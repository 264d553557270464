#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "patchflow/config.hpp"

using namespace patchflow;
namespace fs = std::filesystem;

namespace {

std::string error_of(const std::string& text) {
  try {
    parse_config_text(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST(Config, MinimalAppliesDefaults) {
  const auto cfg = parse_config_text(R"j({"kernel": "cauchy"})j");
  EXPECT_EQ(cfg.sim.dt, 1e-3);
  EXPECT_EQ(cfg.sim.n_markers, 512u);
  EXPECT_EQ(cfg.sim.integrator, Integrator::rk4);
  EXPECT_EQ(cfg.sim.t_end, 1.0);
  EXPECT_EQ(cfg.kernel.variant(), KernelVariant::cauchy);
  const auto s = cfg.shape();
  EXPECT_EQ(s.kind, ShapeKind::ellipse);
  EXPECT_EQ(s.params, (std::vector<double>{2, 1, 0}));
}

TEST(Config, LinearMapNeedsL) {
  const auto e = error_of(R"j({"kernel": "linear-map"})j");
  EXPECT_NE(e.find("'L'"), std::string::npos) << e;
  const auto cfg = parse_config_text(R"j({"kernel": "linear-map", "L": [[0, -1], [1, 0]]})j");
  EXPECT_EQ(cfg.kernel.variant(), KernelVariant::linear_map_of_grad_n);
  EXPECT_NEAR(cfg.kernel.matrix()(1, 0), 1 / (2 * pi), 1e-15);
  EXPECT_NE(error_of(R"j({"kernel": "linear-map", "L": [[0, -1]]})j").find("'L'"), std::string::npos);
}

TEST(Config, UnknownKernelListsValid) {
  const auto e = error_of(R"j({"kernel": "stokes"})j");
  for (const char* k : {"cauchy", "euler", "aggregation", "linear-map"}) EXPECT_NE(e.find(k), std::string::npos) << e;
}

TEST(Config, UnknownKeyNamed) {
  EXPECT_NE(error_of(R"j({"kernel": "cauchy", "dtt": 0.1})j").find("'dtt'"), std::string::npos);
}

TEST(Config, InvalidFieldsNamed) {
  EXPECT_NE(error_of(R"j({"kernel": "cauchy", "dt": -1})j").find("'dt'"), std::string::npos);
  EXPECT_NE(error_of(R"j({"kernel": "cauchy", "dt": "x"})j").find("'dt'"), std::string::npos);
  EXPECT_NE(error_of(R"j({"kernel": "cauchy", "n_markers": 8})j").find("'n_markers'"), std::string::npos);
  EXPECT_NE(error_of(R"j({"kernel": "cauchy", "integrator": "euler"})j").find("'integrator'"), std::string::npos);
  EXPECT_NE(error_of(R"j({"kernel": "cauchy", "a0": 0})j").find("'a0'"), std::string::npos);
  EXPECT_NE(error_of(R"j({"dt": 0.1})j").find("'kernel'"), std::string::npos);
  EXPECT_NE(error_of("[1, 2]").find("object"), std::string::npos);
  EXPECT_NE(error_of("{").find("malformed"), std::string::npos);
}

TEST(Config, ThetaAndShapes) {
  const auto cfg = parse_config_text(R"j({"kernel": "cauchy", "theta0": 0.5236, "n_markers": 256})j");
  EXPECT_EQ(cfg.shape().params[2], 0.5236);
  const auto b = parse_config_text(R"j({"kernel": "euler", "shape": "bump(0.5, 0.1)"})j");
  EXPECT_EQ(b.shape().kind, ShapeKind::bump);
  EXPECT_EQ(make_shape(b.shape(), 64).size(), 64u);
  EXPECT_NE(error_of(R"j({"kernel": "cauchy", "shape": "bump(0.5)"})j").find("bump"), std::string::npos);
  EXPECT_NE(error_of(R"j({"kernel": "cauchy", "shape": "star(1)"})j").find("unknown shape"), std::string::npos);
  EXPECT_NE(error_of(R"j({"kernel": "cauchy", "shape": "rose(3,0.1)", "a0": 2})j").find("conflicts"), std::string::npos);
  EXPECT_THROW(parse_shape("ellipse(2,1,x)"), ConfigError);
}

TEST(Config, ContourFileResolvedAndChecked) {
  const auto dir = fs::temp_directory_path() / "patchflow_cfg_test";
  fs::create_directories(dir);
  io::write_contour_csv(dir / "shape.csv", make_ellipse_contour(2, 1, 0.1, 64));
  std::ofstream(dir / "run.json") << R"j({"kernel": "cauchy", "contour_file": "shape.csv"})j";
  const auto cfg = parse_config(dir / "run.json");
  EXPECT_EQ(cfg.shape().kind, ShapeKind::file);
  EXPECT_EQ(make_shape(cfg.shape(), 999).size(), 64u);
  std::ofstream(dir / "bad.json") << R"j({"kernel": "cauchy", "contour_file": "nope.csv"})j";
  EXPECT_THROW(parse_config(dir / "bad.json"), ConfigError);
  EXPECT_THROW(parse_config(dir / "absent.json"), ConfigError);
}

TEST(Config, ListsAndSweeps) {
  const auto cfg = parse_config_text(R"j({
    "kernel": "cauchy", "kernel_list": ["cauchy", "euler"],
    "shape_list": ["ellipse(2,1,0)", "rose(3,0.05)"],
    "dt_sweep": [0.01, 0.005], "n_markers_sweep": [128, 256],
    "pv_mode": "both", "commutator_fields": ["linear"]})j");
  EXPECT_EQ(cfg.shape_list.size(), 2u);
  EXPECT_EQ(cfg.dt_sweep.size(), 2u);
  EXPECT_NE(error_of(R"j({"kernel": "cauchy", "kernel_list": ["x"]})j").find("'kernel_list'"), std::string::npos);
  EXPECT_NE(error_of(R"j({"kernel": "cauchy", "pv_mode": "x"})j").find("'pv_mode'"), std::string::npos);
  EXPECT_NE(error_of(R"j({"kernel": "cauchy", "commutator_fields": ["cubic"]})j").find("cubic"), std::string::npos);
  EXPECT_NE(error_of(R"j({"kernel": "cauchy", "pv_component": 3})j").find("'pv_component'"), std::string::npos);
}

TEST(Config, DefaultVasinLadder) {
  const auto d = parse_config_text(R"j({"kernel": "cauchy"})j").distances();
  ASSERT_EQ(d.size(), 10u);
  EXPECT_NEAR(d.front(), 1e-3, 1e-18);
  EXPECT_NEAR(d.back(), 1e-1, 1e-15);
}

TEST(Config, ShippedAcceptanceConfigsParse) {
  const fs::path dir = fs::path(PATCHFLOW_SOURCE_DIR) / "configs" / "acceptance";
  int count = 0;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.path().extension() != ".json") continue;
    EXPECT_NO_THROW(parse_config(e.path())) << e.path();
    ++count;
  }
  EXPECT_EQ(count, 11);
}
