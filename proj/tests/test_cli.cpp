#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "support/oracles.hpp"
#include "surfclust/commands.hpp"
#include "surfclust/error.hpp"

using namespace surfclust;
namespace fs = std::filesystem;

namespace {

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / (std::string("surfclust_cli_") + info->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path path(const std::string& name) const { return dir_ / name; }

  void write(const std::string& name, const std::string& text) const { std::ofstream(path(name)) << text; }

  static Json load(const fs::path& p) { return Json::parse(read_file(p)); }

  std::ostringstream out_, err_;
  fs::path dir_;
};

// Surfaces on a 12 x 12 grid of [0, 1]², level v plus a small ripple.
std::string grid_csv(const std::vector<std::pair<std::string, double>>& surfaces, double ripple = 0.0) {
  std::string text = "surface_id,x,y,z\n";
  for (const auto& [id, level] : surfaces) {
    for (int i = 0; i < 12; ++i) {
      for (int j = 0; j < 12; ++j) {
        const double x = i / 11.0, y = j / 11.0;
        text += id + "," + format_double(x) + "," + format_double(y) + "," +
                format_double(level + ripple * std::sin(3 * x + level) * y) + "\n";
      }
    }
  }
  return text;
}

}  // namespace

TEST_F(CliTest, FitConstantSurfaceGivesAllOnes) {
  write("one.csv", grid_csv({{"flat", 1.0}}));
  ASSERT_EQ(cmd_fit({path("one.csv"), path("one.json"), 3, 2}, out_, err_), kExitOk) << err_.str();
  const CoefficientSet set = coefficient_set_from_json(load(path("one.json")));
  ASSERT_EQ(set.values.size(), 1u);
  EXPECT_EQ(set.values[0].rows(), 6);
  EXPECT_LE((set.values[0].array() - 1.0).abs().maxCoeff(), 1e-10);
  EXPECT_TRUE(fs::exists(path("one.json.manifest.json")));
}

TEST_F(CliTest, MalformedRowIsParseErrorNamingTheLine) {
  write("bad.csv", "surface_id,x,y,z\ns1,0,0,1\na,b,c\n");
  EXPECT_EQ(cmd_fit({path("bad.csv"), path("bad.json"), 3, 2}, out_, err_), kExitData);
  EXPECT_NE(err_.str().find("parse-error"), std::string::npos) << err_.str();
  EXPECT_NE(err_.str().find(":3:"), std::string::npos) << err_.str();
  EXPECT_FALSE(fs::exists(path("bad.json")));
}

TEST_F(CliTest, FitTooFewPointsIsNumericalFailure) {
  write("few.csv", "surface_id,x,y,z\ns1,0,0,1\ns1,1,1,2\n");
  EXPECT_EQ(cmd_fit({path("few.csv"), path("few.json"), 3, 6}, out_, err_), kExitNumerical);
}

TEST_F(CliTest, FitMatchesInProcessFitOnGeneratedScenario) {
  GenerateArgs gen;
  gen.scenario = 1;
  gen.c = 0.7;
  gen.seed = 4;
  gen.output = path("s1.csv");
  gen.truth_output = path("truth.csv");
  ASSERT_EQ(cmd_generate(gen, out_, err_), kExitOk) << err_.str();
  ASSERT_EQ(cmd_fit({path("s1.csv"), path("s1.json"), 3, 6}, out_, err_), kExitOk) << err_.str();

  const auto surfaces = read_surface_csv(path("s1.csv"));
  const auto spec = std::make_shared<const BasisSpec>(make_clamped_spec(3, 6, -4.5, 5.0));
  const CoefficientSet set = coefficient_set_from_json(load(path("s1.json")));
  ASSERT_EQ(set.values.size(), 60u);
  EXPECT_EQ(*set.spec_x, *spec);
  for (std::size_t i = 0; i < surfaces.size(); i += 7) {
    EXPECT_EQ(set.ids[i], surfaces[i].id);
    EXPECT_LE((set.values[i] - fit_surface(surfaces[i], spec, spec).values).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST_F(CliTest, SurfaceCsvRoundTripKeepsFifteenDigits) {
  std::mt19937_64 gen(1);
  std::uniform_real_distribution<double> u(-1e3, 1e3);
  std::vector<SurfaceSamples> surfaces{{"a", {}}, {"b", {}}};
  for (auto& s : surfaces) {
    for (int j = 0; j < 50; ++j) s.points.push_back({u(gen), u(gen) * 1e-7, u(gen) * 1e9});
  }
  std::ostringstream first;
  write_surface_csv(first, surfaces);
  std::istringstream in(first.str());
  const auto back = read_surface_csv(in);
  ASSERT_EQ(back.size(), 2u);
  for (std::size_t s = 0; s < 2; ++s) {
    for (std::size_t j = 0; j < 50; ++j) {
      const auto& p = surfaces[s].points[j];
      const auto& q = back[s].points[j];
      EXPECT_NEAR(q.x, p.x, 1e-15 * std::abs(p.x));
      EXPECT_NEAR(q.y, p.y, 1e-15 * std::abs(p.y));
      EXPECT_NEAR(q.z, p.z, 1e-15 * std::abs(p.z));
    }
  }
  std::ostringstream second;
  write_surface_csv(second, back);
  EXPECT_EQ(first.str(), second.str());
}

TEST_F(CliTest, ClusterWithKEqualToNHasZeroObjective) {
  write("four.csv", grid_csv({{"a", 0.0}, {"b", 1.0}, {"c", 2.0}, {"d", 5.0}}, 0.2));
  ASSERT_EQ(cmd_fit({path("four.csv"), path("four.json"), 2, 2}, out_, err_), kExitOk) << err_.str();
  ClusterArgs args;
  args.input = path("four.json");
  args.output = path("clusters.json");
  args.k = 4;
  ASSERT_EQ(cmd_cluster(args, out_, err_), kExitOk) << err_.str();
  const Json report = load(path("clusters.json"));
  EXPECT_EQ(report["objective"].get<double>(), 0.0);
  std::set<int> labels;
  for (const auto& s : report["surfaces"]) labels.insert(s["label"].get<int>());
  EXPECT_EQ(labels, (std::set<int>{1, 2, 3, 4}));

  args.k = 5;
  EXPECT_EQ(cmd_cluster(args, out_, err_), kExitData);
}

TEST_F(CliTest, ClusterSplitsObviousGroupsAndRepeats) {
  write("groups.csv", grid_csv({{"a1", 0.0}, {"a2", 0.1}, {"a3", 0.2}, {"b1", 4.0}, {"b2", 4.1}, {"b3", 4.3}}, 0.3));
  ASSERT_EQ(cmd_fit({path("groups.csv"), path("groups.json"), 3, 2}, out_, err_), kExitOk) << err_.str();
  const CoefficientSet set = coefficient_set_from_json(load(path("groups.json")));
  const auto best = oracle::best_two_partition(set.values);

  ClusterArgs args;
  args.input = path("groups.json");
  args.output = path("c1.json");
  args.seed = 9;
  ASSERT_EQ(cmd_cluster(args, out_, err_), kExitOk) << err_.str();
  const Json report = load(path("c1.json"));
  std::vector<int> labels;
  for (const auto& s : report["surfaces"]) labels.push_back(s["label"].get<int>() - 1);
  EXPECT_EQ(misspecification(labels, best.labels, 2), 0);
  EXPECT_EQ(misspecification(labels, std::vector<int>{0, 0, 0, 1, 1, 1}, 2), 0);

  args.output = path("c2.json");
  ASSERT_EQ(cmd_cluster(args, out_, err_), kExitOk);
  EXPECT_EQ(read_file(path("c1.json")), read_file(path("c2.json")));
}

TEST_F(CliTest, EvaluateExamples) {
  write("truth.csv", "surface_id,label\ns1,1\ns2,1\ns3,1\ns4,2\ns5,2\ns6,2\n");
  write("swapped.csv", "surface_id,label\ns1,2\ns2,2\ns3,2\ns4,1\ns5,1\ns6,1\n");
  write("one_off.csv", "surface_id,label\ns1,1\ns2,1\ns3,2\ns4,2\ns5,2\ns6,2\n");
  write("short.csv", "surface_id,label\ns1,1\ns2,1\n");
  write("zero.csv", "surface_id,label\ns1,0\ns2,1\ns3,1\ns4,2\ns5,2\ns6,2\n");

  auto run = [&](const char* pred) {
    const fs::path result = path(std::string(pred) + ".eval.json");
    const int code = cmd_evaluate({path(pred), path("truth.csv"), result}, out_, err_);
    return code == kExitOk ? load(result)["misspecification"].get<int>() : -code;
  };
  EXPECT_EQ(run("truth.csv"), 0);
  EXPECT_EQ(run("swapped.csv"), 0);
  EXPECT_EQ(run("one_off.csv"), 1);
  EXPECT_EQ(run("short.csv"), -kExitData);
  EXPECT_EQ(run("zero.csv"), -kExitData);
}

TEST_F(CliTest, SimulateLowCAndNoiselessRuns) {
  SimulateArgs args;
  args.scenario = 1;
  args.c = {0.2};
  args.runs = 10;
  args.output = path("sim");
  ASSERT_EQ(cmd_simulate(args, out_, err_), kExitOk) << err_.str();
  const Json report = load(path("sim") / "report.json");
  const Json& r = report["results"][0];
  EXPECT_LE(r["proposed"]["mean_misclustered"].get<double>(), 1.0);
  EXPECT_LE(r["benchmark"]["mean_misclustered"].get<double>(), 1.0);
  EXPECT_EQ(r["runs_completed"].size(), 10u);
  const std::string plot = read_file(path("sim") / "errors.csv");
  EXPECT_EQ(plot.rfind("method,c,run,errors\n", 0), 0u);
  EXPECT_EQ(std::count(plot.begin(), plot.end(), '\n'), 21);

  args.runs = 1;
  args.noise_sd = 0.0;
  args.output = path("sim0");
  ASSERT_EQ(cmd_simulate(args, out_, err_), kExitOk);
  const Json doc0 = load(path("sim0") / "report.json");
  const Json& r0 = doc0["results"][0];
  EXPECT_EQ(r0["proposed"]["per_run"], Json::array({0}));
  EXPECT_EQ(r0["benchmark"]["per_run"], Json::array({0}));
}

TEST_F(CliTest, SimulateRejectsBadConfig) {
  SimulateArgs args;
  args.scenario = 4;
  args.output = path("bad");
  EXPECT_EQ(cmd_simulate(args, out_, err_), kExitUsage);
  args.scenario = 1;
  args.c = {-1.0};
  EXPECT_EQ(cmd_simulate(args, out_, err_), kExitUsage);
}

TEST_F(CliTest, RerunFromManifestReproducesOutput) {
  GenerateArgs gen;
  gen.scenario = 2;
  gen.c = 1.2;
  gen.seed = 11;
  gen.output = path("s2.csv");
  ASSERT_EQ(cmd_generate(gen, out_, err_), kExitOk);
  ASSERT_EQ(cmd_fit({path("s2.csv"), path("s2.json"), 3, 6}, out_, err_), kExitOk);
  ClusterArgs args;
  args.input = path("s2.json");
  args.output = path("s2.clusters.json");
  args.k = 3;
  ASSERT_EQ(cmd_cluster(args, out_, err_), kExitOk);

  const std::string csv = read_file(path("s2.csv"));
  const std::string clusters = read_file(path("s2.clusters.json"));
  fs::remove(path("s2.csv"));
  fs::remove(path("s2.clusters.json"));
  ASSERT_EQ(cmd_rerun(path("s2.csv.manifest.json"), out_, err_), kExitOk) << err_.str();
  ASSERT_EQ(cmd_rerun(path("s2.clusters.json.manifest.json"), out_, err_), kExitOk) << err_.str();
  EXPECT_EQ(read_file(path("s2.csv")), csv);
  EXPECT_EQ(read_file(path("s2.clusters.json")), clusters);

  SimulateArgs sim;
  sim.scenario = 2;
  sim.c = {1.0};
  sim.runs = 2;
  sim.output = path("sim");
  ASSERT_EQ(cmd_simulate(sim, out_, err_), kExitOk);
  Json first = load(path("sim") / "report.json");
  ASSERT_EQ(cmd_rerun(path("sim") / "manifest.json", out_, err_), kExitOk);
  Json second = load(path("sim") / "report.json");
  for (Json* j : {&first, &second}) {
    for (auto& r : (*j)["results"]) r.erase("timings");
  }
  EXPECT_EQ(first, second);

  write("junk.json", "{\"hello\": 1}");
  EXPECT_EQ(cmd_rerun(path("junk.json"), out_, err_), kExitData);
}
