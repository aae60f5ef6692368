#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "pbg/binary_type.hpp"
#include "pbg/io.hpp"
#include "pbg/symmetric_eq.hpp"

namespace fs = std::filesystem;

namespace pbg {
namespace {

fs::path scratch(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("pbg_test_" + name);
  fs::remove_all(p);
  return p;
}

TEST(Config, SymmetricFromJson) {
  GameConfig cfg = game_from_json(json::parse(R"({"p":[0.8,0.6],"gamma":1,"beta":2})"));
  EXPECT_EQ(cfg.n, 2);
  EXPECT_FALSE(cfg.split.has_value());
  EXPECT_DOUBLE_EQ(cfg.cost.beta, 2.0);
}

TEST(Config, BundledRow) {
  GameConfig cfg = game_from_json(json::parse(R"({"bias_row":"C","gamma":1,"beta":4,"p0":0.9888})"));
  EXPECT_EQ(cfg.n, 10);
}

TEST(Config, BinaryRoundTrip) {
  json j = json::parse(R"({"p":[0.9,0.7,0.5,0.3],"n_H":2,"gamma_H":1,"gamma_L":3,"beta":3})");
  GameConfig a = game_from_json(j);
  GameConfig b = game_from_json(game_to_json(a));
  EXPECT_EQ(a.cost.gammas, b.cost.gammas);
  EXPECT_EQ(a.biases.p, b.biases.p);
  EXPECT_EQ(b.split->n_H, 2);
}

TEST(Config, UnknownKeyRejected) {
  try {
    reject_unknown(json::parse(R"({"p":[1],"gama":1})"), kGameKeys);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::Config);
    EXPECT_NE(std::string(e.what()).find("gama"), std::string::npos);
  }
}

TEST(Config, SizeMismatch) {
  EXPECT_THROW(game_from_json(json::parse(R"({"n":3,"p":[0.8,0.6],"gamma":1,"beta":2})")), Error);
}

TEST(Config, MissingBeta) {
  try {
    game_from_json(json::parse(R"({"p":[0.8,0.6],"gamma":1})"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::Config);
  }
}

TEST(Files, StrategyRoundTrip) {
  SymmetricEquilibrium eq = solve_symmetric(make_symmetric({0.9, 0.6, 0.3}, 1.0, 2.0));
  fs::path dir = scratch("strategy");
  fs::create_directories(dir);
  write_strategy_csv(dir / "s.csv", eq.strategy);
  MixedStrategy back = read_strategy_csv(dir / "s.csv");
  EXPECT_EQ(back.grid(), eq.strategy.grid());
  EXPECT_EQ(back.cdf_values(), eq.strategy.cdf_values());
  fs::remove_all(dir);
}

TEST(Files, PointMassRoundTrip) {
  fs::path dir = scratch("point");
  fs::create_directories(dir);
  write_strategy_csv(dir / "s.csv", MixedStrategy::point_mass(0.15));
  MixedStrategy back = read_strategy_csv(dir / "s.csv");
  EXPECT_DOUBLE_EQ(back.atom_at(0.15), 1.0);
  EXPECT_DOUBLE_EQ(back.mean(), 0.15);
  fs::remove_all(dir);
}

TEST(Files, EquilibriumRoundTripVerifies) {
  GameConfig cfg = make_binary({0.9, 0.75, 0.63, 0.52, 0.42, 0.34, 0.28, 0.24, 0.20, 0.18}, 5, 1.0, 3.0, 3.0);
  BinaryTypeEquilibrium eq = solve_binary(cfg);
  fs::path dir = scratch("equilibrium");
  write_equilibrium(dir, {{"kind", "binary"}}, eq.groups(), eq.effective_p, cfg.cost.beta);
  EquilibriumFiles ef = read_equilibrium(dir);
  EXPECT_EQ(ef.groups.size(), 2u);
  EXPECT_EQ(ef.effective_p, eq.effective_p);
  const double direct = verify_equilibrium(eq.groups(), eq.effective_p, 3.0).max_gain;
  EXPECT_NEAR(verify_equilibrium(ef.groups, ef.effective_p, ef.beta).max_gain, direct, 1e-12);
  fs::remove_all(dir);
}

TEST(Files, MalformedStrategyRow) {
  fs::path dir = scratch("bad");
  fs::create_directories(dir);
  std::ofstream(dir / "s.csv") << "x,F,atom\n0.1,zero,0\n";
  EXPECT_THROW(read_strategy_csv(dir / "s.csv"), Error);
  fs::remove_all(dir);
}

int run(const std::string& args) {
  const std::string cmd = std::string(PBG_CLI) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

TEST(Cli, ExitCodes) {
  const fs::path out = scratch("cli_codes");
  EXPECT_EQ(run("solve-symmetric --config " PBG_FIXTURE_DIR "/missing.json --out " + out.string()), 1);
  EXPECT_EQ(run("solve-symmetric --config " PBG_FIXTURE_DIR "/tied.json --out " + out.string()), 2);
  EXPECT_EQ(run("sweep --config " PBG_FIXTURE_DIR "/sweep_empty.json --out " + (out / "s.csv").string()), 1);
  EXPECT_EQ(run("solve-symmetric --config " PBG_FIXTURE_DIR "/example_b.json --out " + out.string()), 0);
  fs::remove_all(out);
}

TEST(Cli, SymmetricHeader) {
  const fs::path out = scratch("cli_sym");
  ASSERT_EQ(run("solve-symmetric --config " PBG_FIXTURE_DIR "/example_b.json --out " + out.string()), 0);
  json h = load_json(out / "equilibrium.json");
  EXPECT_NEAR(h.at("u").get<double>(), 0.09, 1e-12);
  fs::remove_all(out);
}

TEST(Cli, BinaryRegimes) {
  const fs::path out = scratch("cli_bin");
  const std::pair<const char*, const char*> cases[] = {{"separated_gl3.json", "SeparatedStrict"},
                                                       {"hybrid_case2.json", "HybridCase2"},
                                                       {"equal_types.json", "Symmetric"}};
  for (const auto& [file, regime] : cases) {
    ASSERT_EQ(run("solve-binary --config " PBG_FIXTURE_DIR "/" + std::string(file) + " --out " + out.string()), 0);
    EXPECT_EQ(load_json(out / "equilibrium.json").at("regime"), regime) << file;
    fs::remove_all(out);
  }
}

TEST(Cli, VerifyPureFixture) {
  const fs::path out = scratch("cli_pure");
  ASSERT_EQ(run("solve-binary --config " PBG_FIXTURE_DIR "/pure_ne.json --out " + (out / "eq").string()), 0);
  ASSERT_EQ(run("verify " + (out / "eq").string() + " --grid 2000 --out " + (out / "v.json").string()), 0);
  EXPECT_LE(load_json(out / "v.json").at("max_gain").get<double>(), 1e-9);
  fs::remove_all(out);
}

TEST(Cli, Deterministic) {
  const fs::path a = scratch("cli_det_a"), b = scratch("cli_det_b");
  for (const fs::path& d : {a, b}) {
    ASSERT_EQ(run("solve-binary --config " PBG_FIXTURE_DIR "/hybrid_case2.json --out " + d.string()), 0);
  }
  EXPECT_EQ(slurp(a / "equilibrium.json"), slurp(b / "equilibrium.json"));
  EXPECT_EQ(slurp(a / "strategy_0.csv"), slurp(b / "strategy_0.csv"));
  EXPECT_EQ(slurp(a / "strategy_1.csv"), slurp(b / "strategy_1.csv"));
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST(Cli, DesignUblMatchesTpblRatioOne) {
  const fs::path out = scratch("cli_design");
  ASSERT_EQ(run("design --config " PBG_FIXTURE_DIR "/table5_symmetric.json --mechanism ubl --out " +
                (out / "u.json").string()),
            0);
  ASSERT_EQ(run("design --config " PBG_FIXTURE_DIR "/table5_symmetric.json --mechanism tpbl --ratio 1 --out " +
                (out / "t.json").string()),
            0);
  EXPECT_EQ(load_json(out / "u.json").at("q"), load_json(out / "t.json").at("q"));
  fs::remove_all(out);
}

TEST(Cli, SimulateEstimateSeeded) {
  const fs::path out = scratch("cli_em");
  fs::create_directories(out);
  std::ofstream(out / "sim.json") << R"({"layouts":[{"interface":"A","rank_bias":[0.9,0.6,0.3]}],)"
                                  << R"("attractiveness":[0.3,0.5,0.7,0.9],"sessions":2000})";
  for (const char* name : {"a.csv", "b.csv"}) {
    ASSERT_EQ(run("simulate-clicks --config " + (out / "sim.json").string() + " --seed 9 --out " +
                  (out / name).string()),
              0);
  }
  EXPECT_EQ(slurp(out / "a.csv"), slurp(out / "b.csv"));
  ASSERT_EQ(run("estimate-pbm " + (out / "a.csv").string() + " --out " + (out / "fit.json").string()), 0);
  EXPECT_EQ(load_json(out / "fit.json").at("rank_bias").at("A").size(), 3u);
  fs::remove_all(out);
}

}  // namespace
}  // namespace pbg
