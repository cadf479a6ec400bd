// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <array>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "support/oracles.hpp"
#include "surfclust/evalmetrics.hpp"
#include "surfclust/io.hpp"
#include "surfclust/matkmeans.hpp"
#include "surfclust/simlab.hpp"
#include "surfclust/tensorfit.hpp"

using namespace surfclust;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void verdict(int id, bool pass, const std::string& summary) {
  std::cout << (pass ? "PASS" : "FAIL") << " criterion " << id << ": " << summary << std::endl;
  if (!pass) ++failures;
}

std::string num(double v) {
  std::ostringstream s;
  s.precision(4);
  s << v;
  return s.str();
}

McReport simulate(int scenario, double c) {
  ScenarioConfig config = ScenarioConfig::defaults(scenario);
  config.c = c;
  config.runs = 50;
  config.seed = 1;
  config.threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  const McReport report = run_monte_carlo(config);
  std::cout << "  scenario " << scenario << " c=" << c << ": proposed mean " << num(report.proposed.mean_misclustered)
            << " (nu " << num(report.proposed.aggregate.nu) << ", phi " << num(report.proposed.aggregate.phi)
            << "), benchmark mean " << num(report.benchmark.mean_misclustered) << " (nu "
            << num(report.benchmark.aggregate.nu) << ", phi " << num(report.benchmark.aggregate.phi) << "), "
            << report.failed.size() << " failed runs, " << num(report.seconds) << " s" << std::endl;
  return report;
}

void criterion1() {
  bool pass = true;
  std::string notes;
  for (double c : {0.2, 0.3, 0.5}) {
    const McReport r = simulate(1, c);
    const bool ok = r.failed.empty() && r.proposed.mean_misclustered <= 1.0 && r.benchmark.mean_misclustered <= 1.0;
    pass &= ok;
    if (!ok) notes += " c=" + num(c) + " not <= 1;";
  }
  const McReport mid = simulate(1, 0.7);
  if (!(mid.proposed.mean_misclustered <= 0.5 * mid.benchmark.mean_misclustered)) {
    pass = false;
    notes += " c=0.7 proposed " + num(mid.proposed.mean_misclustered) + " > half of benchmark " +
             num(mid.benchmark.mean_misclustered) + ";";
  }
  const McReport high = simulate(1, 3.0);
  if (!(high.proposed.mean_misclustered <= 3.0)) {
    pass = false;
    notes += " c=3 proposed " + num(high.proposed.mean_misclustered) + " > 3;";
  }
  if (!(high.benchmark.mean_misclustered >= 10.0)) {
    pass = false;
    notes += " c=3 benchmark " + num(high.benchmark.mean_misclustered) + " < 10;";
  }
  verdict(1, pass, "scenario 1 error shape at B=50" + (notes.empty() ? std::string() : ":" + notes));
}

void criterion2() {
  bool pass = true;
  std::string notes;
  for (double c : {0.2, 1.0, 2.0}) {
    const McReport r = simulate(2, c);
    if (!(r.proposed.mean_misclustered < r.benchmark.mean_misclustered)) {
      pass = false;
      notes += " c=" + num(c) + " proposed " + num(r.proposed.mean_misclustered) + " not < benchmark " +
               num(r.benchmark.mean_misclustered) + ";";
    }
  }
  verdict(2, pass, "scenario 2 proposed beats benchmark at B=50" + (notes.empty() ? std::string() : ":" + notes));
}

void criterion3() {
  const std::array<std::size_t, 3> sizes{200, 800, 3200};
  const auto table = coefficient_convergence(sizes, 20, 1);
  std::string medians;
  for (const auto& row : table) {
    medians += " m=" + std::to_string(row.size) + ":" + num(row.median);
    if (row.redraws > 0) medians += "(" + std::to_string(row.redraws) + " redraws)";
  }
  const bool pass = table[0].median > table[1].median && table[1].median > table[2].median;
  verdict(3, pass, "coefficient medians strictly decreasing;" + medians);
}

void criterion4() {
  const std::array<std::size_t, 3> sizes{50, 200, 800};
  const auto table = center_consistency(sizes, 20, 1);
  std::string medians;
  for (const auto& row : table) medians += " n=" + std::to_string(row.size) + ":" + num(row.median);
  const bool pass = table[0].median >= table[1].median && table[1].median >= table[2].median;
  verdict(4, pass, "center Hausdorff medians non-increasing;" + medians);
}

void criterion5() {
  std::mt19937_64 gen(5);
  int mismatches = 0;
  for (int K = 2; K <= 4; ++K) {
    std::uniform_int_distribution<int> label(0, K - 1);
    std::uniform_int_distribution<int> size(K, 40);
    for (int t = 0; t < 200; ++t) {
      const int n = size(gen);
      std::vector<int> pred(static_cast<std::size_t>(n)), truth(static_cast<std::size_t>(n));
      for (int i = 0; i < n; ++i) {
        pred[static_cast<std::size_t>(i)] = label(gen);
        truth[static_cast<std::size_t>(i)] = label(gen);
      }
      if (misspecification_by_assignment(pred, truth, K) != oracle::misspec_brute_force(pred, truth, K)) ++mismatches;
    }
  }
  verdict(5, mismatches == 0, "assignment equals K! enumeration on 600 instances; mismatches " +
                                  std::to_string(mismatches));
}

void criterion6() {
  std::mt19937_64 gen(6);
  std::uniform_int_distribution<int> size(3, 8);
  int optimal = 0, potential_rises = 0, eq3_rises = 0;
  for (int t = 0; t < 100; ++t) {
    const int n = size(gen);
    std::vector<Matrix> data;
    for (int i = 0; i < n; ++i) data.push_back(oracle::random_matrix(gen, 3, 3));
    const ClusteringResult result = cluster_with_selected_init(data, 2, static_cast<std::uint64_t>(t));
    const auto& model = result.model;
    if (model.mean_squared_distance <= oracle::best_two_partition(data).mean_squared + 1e-10) ++optimal;
    for (std::size_t i = 1; i < model.potential_trace.size(); ++i) {
      if (model.potential_trace[i] > model.potential_trace[i - 1] * (1 + 1e-12)) ++potential_rises;
    }
    for (std::size_t i = 1; i < model.objective_trace.size(); ++i) {
      if (model.objective_trace[i] > model.objective_trace[i - 1] * (1 + 1e-12)) ++eq3_rises;
    }
  }
  verdict(6, optimal >= 95 && potential_rises == 0,
          "global optimum in " + std::to_string(optimal) + "/100, squared-distance potential rises " +
              std::to_string(potential_rises) + " (mean-distance objective rises, informational: " +
              std::to_string(eq3_rises) + ")");
}

void criterion7() {
  std::mt19937_64 gen(7);
  const auto spec = std::make_shared<const BasisSpec>(make_clamped_spec(3, 6, -5.0, 5.0));
  std::uniform_real_distribution<double> u(-5.0, 5.0);

  double unity = 0.0;
  for (int i = 0; i < 1000; ++i) unity = std::max(unity, std::abs(basis_row(*spec, u(gen)).sum() - 1.0));

  double recovery = 0.0, orthogonality = 0.0, tensor = 0.0;
  for (int t = 0; t < 10; ++t) {
    const Matrix theta = oracle::random_matrix(gen, 10, 10);
    SurfaceSamples s{"s", {}};
    std::vector<double> xs, ys;
    for (int j = 0; j < 500; ++j) {
      const double x = u(gen), y = u(gen);
      xs.push_back(x);
      ys.push_back(y);
      s.points.push_back({x, y, basis_row(*spec, x).dot(theta * basis_row(*spec, y))});
    }
    recovery = std::max(recovery, (fit_surface(s, spec, spec).values - theta).norm());

    std::normal_distribution<double> noise(0.0, 0.05);
    Eigen::VectorXd z(500);
    TensorSamples ts{"t", Eigen::MatrixXd(500, 2), Eigen::VectorXd(500)};
    for (int j = 0; j < 500; ++j) {
      auto& p = s.points[static_cast<std::size_t>(j)];
      p.z = std::cos(p.x) * std::exp(-0.1 * p.y * p.y) + noise(gen);
      z[j] = p.z;
      ts.coords(j, 0) = p.x;
      ts.coords(j, 1) = p.y;
    }
    ts.z = z;
    const Matrix fit = fit_surface(s, spec, spec).values;
    const Eigen::MatrixXd M = design_matrix(xs, ys, *spec, *spec);
    orthogonality = std::max(orthogonality, (M.transpose() * (z - M * vec(fit))).cwiseAbs().maxCoeff() /
                                                z.cwiseAbs().maxCoeff());
    const std::array specs{*spec, *spec};
    tensor = std::max(tensor, (fit_tensor(ts, specs).values - vec(fit)).cwiseAbs().maxCoeff());
  }
  const bool pass = unity <= 1e-12 && recovery <= 1e-8 && orthogonality <= 1e-6 && tensor <= 1e-10;
  verdict(7, pass, "unity " + num(unity) + ", recovery " + num(recovery) + ", orthogonality " + num(orthogonality) +
                       ", tensor vs surface " + num(tensor));
}

Json without_timings(const fs::path& report) {
  Json j = Json::parse(read_file(report));
  for (auto& r : j["results"]) r.erase("timings");
  return j;
}

void criterion8(const std::string& cli) {
  const fs::path dir = fs::temp_directory_path() / "surfclust_acceptance_determinism";
  fs::remove_all(dir);
  bool pass = !cli.empty();
  std::string detail = cli.empty() ? "no --cli binary given" : "";
  if (pass) {
    for (const char* run : {"a", "b"}) {
      const std::string command = "\"" + cli + "\" simulate --scenario 2 --c 0.5 1.5 --runs 4 --seed 99 --output \"" +
                                  (dir / run).string() + "\" > /dev/null";
      if (std::system(command.c_str()) != 0) {
        pass = false;
        detail = "command failed: " + command;
      }
    }
  }
  if (pass) {
    const std::string a = without_timings(dir / "a" / "report.json").dump();
    const std::string b = without_timings(dir / "b" / "report.json").dump();
    pass = a == b;
    detail = pass ? "report.json identical apart from timings (" + std::to_string(a.size()) + " bytes)"
                  : "report.json differs";
  }
  fs::remove_all(dir);
  verdict(8, pass, "repeated simulate runs: " + detail);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"surfclust acceptance suite"};
  std::string cli;
  app.add_option("--cli", cli, "Path to the surfclust executable");
  CLI11_PARSE(app, argc, argv);

  const auto start = std::chrono::steady_clock::now();
  criterion1();
  criterion2();
  criterion3();
  criterion4();
  criterion5();
  criterion6();
  criterion7();
  criterion8(cli);
  std::cout << failures << " of 8 criteria failed, "
            << num(std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count()) << " s"
            << std::endl;
  return failures == 0 ? 0 : 1;
}
