#include <gtest/gtest.h>

#include <string>

#include "rte/error.hpp"
#include "rte_cli/commands.hpp"

using namespace rte;
using namespace rte::cli;
using nlohmann::json;

TEST(Config, DefaultsAndOverrides) {
  const Config c(json{{"nx", 24}}, {"nv=12", "phantom=\"constant\"", "scaling_epsilons=[0.1,0.3]", "lambda_mode=fixed"});
  EXPECT_EQ(c.integer("nx"), 24);
  EXPECT_EQ(c.integer("nv"), 12);
  EXPECT_EQ(c.text("phantom"), "constant");
  EXPECT_EQ(c.text("lambda_mode"), "fixed");  // bare words fall back to strings
  EXPECT_EQ(c.reals("scaling_epsilons"), (std::vector<double>{0.1, 0.3}));
  EXPECT_DOUBLE_EQ(c.real("tol"), 1e-10);
  EXPECT_EQ(c.effective().at("nv"), 12);
  EXPECT_EQ(c.input().at("nx"), 24);
  EXPECT_EQ(c.overrides().size(), 4u);
  EXPECT_EQ(c.with({"seed=9"}).seed(), 9u);
  EXPECT_EQ(c.effective().size(), config_schema().size());
}

TEST(Config, ReportsEveryProblem) {
  try {
    Config(json{{"nx", "many"}, {"bogus", 1}, {"tol", -1.0}, {"phantom", "cube"}}, {});
    FAIL() << "expected a ConfigurationError";
  } catch (const ConfigurationError& e) {
    const std::string m = e.what();
    for (const char* key : {"nx", "bogus", "tol", "phantom"}) EXPECT_NE(m.find(key), std::string::npos) << key;
  }
  EXPECT_THROW(Config(json::array(), {}), ConfigurationError);
  EXPECT_THROW(Config(json::object(), {"novalue"}), ConfigurationError);
  EXPECT_THROW(Config(json::object(), {"nx=1.5"}), ConfigurationError);
}

TEST(Csv, FullPrecisionNumbers) {
  Csv c({"a", "b", "c"});
  c.row({0.1, 3, true});
  EXPECT_EQ(c.str(), "a,b,c\n0.10000000000000001,3,1\n");
  EXPECT_EQ(format_number(1.0 / 3.0), "0.33333333333333331");
  EXPECT_EQ(format_number(std::numeric_limits<double>::infinity()), "inf");
  EXPECT_THROW(c.row({1.0}), ArgumentError);
}

TEST(Report, ChecksFitsAndJson) {
  RunReport r("forward", Config());
  r.check_at_most("small", 0.5, 1.0);
  r.check_within("band", 3.0, 1.0, 2.0);
  r.flag("x");
  r.flag("x");
  r.fit({"line", linear_fit({0, 1, 2}, {0, 2, 4.5}), 2.0, ""});
  const json j = r.to_json("ok");
  EXPECT_FALSE(j.at("checks_passed").get<bool>());
  EXPECT_EQ(j.at("flags").size(), 1u);
  EXPECT_EQ(j.at("checks").at(1).at("upper"), 2.0);
  const json& f = j.at("fits").at(0);
  EXPECT_NEAR(f.at("band").at(1).get<double>() - f.at("slope").get<double>(),
              2.0 * f.at("slope_stderr").get<double>(), 1e-14);
  EXPECT_EQ(j.at("tool"), kToolName);
}

TEST(Commands, ForwardThroughAVoidIsBallistic) {
  const Config c(json{{"nx", 12}, {"nv", 8}, {"kappa", 0.0}, {"phantom", "constant"},
                      {"epsilon", 0.25}, {"epsilon1", 0.25}},
                 {});
  const RunReport r = cmd_forward(c);
  EXPECT_TRUE(r.has_flag("ballistic-only"));
  EXPECT_TRUE(r.checks_passed());
  EXPECT_EQ(r.metrics().at("E2"), 0.0);
  EXPECT_NE(r.file("outflow.csv"), nullptr);
}

TEST(Commands, UnknownCommandIsAConfigurationError) {
  EXPECT_THROW(run_command("teleport", Config()), ConfigurationError);
  EXPECT_EQ(command_names().size(), 5u);
}

TEST(Commands, NoiseIsSeededAndRelative) {
  PhantomSpec ps;
  const Transport t(Phantom(ps).build(Grid::square(8, 8)));
  Experiment a = run_experiment(t, {find_anchor(t.inflow(), {0.0, 0.5}, 0), 0.25, false});
  Experiment b = a, c = a;
  add_noise(t, b, 0.01, 4);
  add_noise(t, c, 0.01, 4);
  EXPECT_EQ(b.phi.values, c.phi.values);
  for (std::size_t i = 0; i < a.phi.size(); ++i) {
    if (a.phi[i] == 0.0) {
      EXPECT_EQ(b.phi[i], 0.0);
    }
  }
  add_noise(t, c, 0.0, 5);
  EXPECT_EQ(b.phi.values, c.phi.values);
}

TEST(Commands, SigmaClosedLoopOnACoarseGrid) {
  const Config c(json{{"nx", 24}, {"nv", 24}, {"epsilon", 0.25}, {"recon_nx", 3},
                      {"angles", 12}, {"offsets", 5}, {"phantom", "smooth-bump"}},
                 {});
  const SigmaLevel L = run_sigma_level(c, 24, 0.25, 3);
  EXPECT_GT(L.system.used.size(), 30u);
  EXPECT_GT(L.discrepancy.lambda, 0.0);
  EXPECT_LT(L.error.relative_l2, 0.15);
  EXPECT_THROW(run_sigma_level(c, 24, 0.05, 3), ConfigurationError);  // eps/2 < dx
}

TEST(Commands, ScalingIsDeterministic) {
  const Config c(json{{"nx", 12}, {"nv", 16}, {"phantom", "constant"}, {"sigma0", 3.0}, {"kappa", 2.9},
                      {"scaling_epsilons", {0.25, 0.5}}, {"scaling_epsilon1", 0.25},
                      {"xray_nx", {8, 16}}},
                 {});
  const RunReport a = cmd_scaling(c), b = cmd_scaling(c);
  ASSERT_FALSE(a.files().empty());
  for (const auto& [name, content] : a.files()) {
    ASSERT_NE(b.file(name), nullptr) << name;
    EXPECT_EQ(*b.file(name), content) << name;
  }
}
