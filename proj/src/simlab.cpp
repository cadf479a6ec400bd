#include "surfclust/simlab.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <mutex>
#include <numbers>
#include <optional>
#include <thread>

#include "surfclust/error.hpp"
#include "surfclust/random.hpp"

namespace surfclust {

namespace {

// Sub-seed streams of one Monte Carlo run.
constexpr std::uint64_t kDataStream = 1;
constexpr std::uint64_t kProposedStream = 2;
constexpr std::uint64_t kBenchmarkStream = 3;

MixtureComponent component(double w, double mx, double my, double sxx, double syy) {
  MixtureComponent k;
  k.weight = w;
  k.mean << mx, my;
  k.cov << sxx, 0.0, 0.0, syy;
  return k;
}

}  // namespace

double mixture_density(std::span<const MixtureComponent> components, double x, double y) {
  double total = 0.0;
  for (const auto& k : components) {
    const double det = k.cov.determinant();
    if (!(det > 0.0) || std::abs(k.cov(0, 1) - k.cov(1, 0)) > 1e-12 * k.cov.cwiseAbs().maxCoeff()) {
      throw Error(ErrorKind::singular_covariance, "covariance must be symmetric positive definite");
    }
    const Eigen::Vector2d d(x - k.mean.x(), y - k.mean.y());
    const double quad = d.dot(k.cov.inverse() * d);
    total += k.weight * std::exp(-0.5 * quad) / (2.0 * std::numbers::pi * std::sqrt(det));
  }
  return total;
}

int scenario_cluster_count(int scenario) {
  switch (scenario) {
    case 1: return 2;
    case 2: return 3;
    default: throw Error(ErrorKind::invalid_config, "unknown scenario " + std::to_string(scenario));
  }
}

Mixture scenario_center(int scenario, int cluster, double c) {
  if (!(c > 0.0)) throw Error(ErrorKind::invalid_config, "c must be positive");
  if (cluster < 1 || cluster > scenario_cluster_count(scenario)) {
    throw Error(ErrorKind::invalid_config, "scenario " + std::to_string(scenario) + " has no cluster " +
                                               std::to_string(cluster));
  }
  if (scenario == 1) {
    if (cluster == 1) return {component(0.3, 0, -3, 1, 5), component(0.7, 0, 3, 1, 1)};
    return {component(0.3, 0, -3, c, c), component(0.7, 0, 3, c, c)};
  }
  switch (cluster) {
    case 1: return {component(0.3, 0, -3, 1, 1), component(0.7, 0, 1, 1, 1)};
    case 2: return {component(0.3, 0, 1, c, 2 * c), component(0.7, 0, -3, c, c)};
    default: return {component(0.3, 0, -2, c, c), component(0.7, 1, 0, c, c)};
  }
}

ScenarioConfig ScenarioConfig::defaults(int scenario) {
  ScenarioConfig config;
  config.scenario = scenario;
  if (scenario == 1) {
    config.n_per_cluster = {30, 30};
    config.noise_sd = {0.015, 0.01};
  } else if (scenario == 2) {
    config.n_per_cluster = {20, 20, 20};
    config.noise_sd = {0.015, 0.015, 0.015};
  } else {
    throw Error(ErrorKind::invalid_config, "unknown scenario " + std::to_string(scenario));
  }
  return config;
}

int ScenarioConfig::surface_count() const {
  int n = 0;
  for (int k : n_per_cluster) n += k;
  return n;
}

void ScenarioConfig::validate() const {
  auto fail = [](const std::string& what) { throw Error(ErrorKind::invalid_config, what); };
  const int K = scenario_cluster_count(scenario);
  if (!(c > 0.0) || !std::isfinite(c)) fail("c must be positive");
  if (static_cast<int>(n_per_cluster.size()) != K) fail("need one surface count per cluster");
  if (static_cast<int>(noise_sd.size()) != K) fail("need one noise level per cluster");
  for (int n : n_per_cluster) {
    if (n < 1) fail("every cluster needs at least one surface");
  }
  for (double s : noise_sd) {
    if (!(s >= 0.0) || !std::isfinite(s)) fail("noise levels must be finite and nonnegative");
  }
  if (!(domain_lo < domain_hi)) fail("empty domain");
  if (degree < 0 || interior_knots < 0) fail("negative spline degree or knot count");
  if (grid_points_per_axis < degree + interior_knots + 1) {
    fail("grid of " + std::to_string(grid_points_per_axis) + " points per axis cannot identify " +
         std::to_string(degree + interior_knots + 1) + " basis functions");
  }
  if (runs < 1) fail("need at least one run");
  if (n_random_inits < 0) fail("negative random initialization count");
  if (max_iter < 1) fail("max_iter must be positive");
  if (surface_count() < K) fail("fewer surfaces than clusters");
}

std::vector<double> grid_axis(const ScenarioConfig& config) {
  std::vector<double> axis;
  const double step = (config.domain_hi - config.domain_lo) / config.grid_points_per_axis;
  for (int j = 1; j <= config.grid_points_per_axis; ++j) axis.push_back(config.domain_lo + j * step);
  return axis;
}

SpecPtr fitting_spec(const ScenarioConfig& config) {
  const std::vector<double> axis = grid_axis(config);
  return std::make_shared<const BasisSpec>(
      make_clamped_spec(config.degree, config.interior_knots, axis.front(), axis.back()));
}

Dataset generate_dataset(const ScenarioConfig& config, std::uint64_t run_seed) {
  config.validate();
  const std::vector<double> axis = grid_axis(config);
  Rng rng(run_seed);
  Dataset data;
  for (int k = 0; k < config.cluster_count(); ++k) {
    const Mixture center = scenario_center(config.scenario, k + 1, config.c);
    std::vector<double> clean;
    clean.reserve(axis.size() * axis.size());
    for (double x : axis) {
      for (double y : axis) clean.push_back(mixture_density(center, x, y));
    }
    const double sd = config.noise_sd[static_cast<std::size_t>(k)];
    for (int s = 0; s < config.n_per_cluster[static_cast<std::size_t>(k)]; ++s) {
      SurfaceSamples surface;
      surface.id = "c" + std::to_string(k + 1) + "_s" + std::to_string(s + 1);
      surface.points.reserve(clean.size());
      std::size_t j = 0;
      for (double x : axis) {
        for (double y : axis) {
          const double noise = sd > 0.0 ? sd * rng.normal() : 0.0;
          surface.points.push_back({x, y, clean[j++] + noise});
        }
      }
      data.surfaces.push_back(std::move(surface));
      data.truth.push_back(k);
    }
  }
  return data;
}

std::vector<Matrix> raw_vectors(std::span<const SurfaceSamples> surfaces) {
  std::vector<Matrix> out;
  std::vector<std::pair<double, double>> reference;
  for (const auto& s : surfaces) {
    std::vector<std::size_t> order(s.points.size());
    for (std::size_t j = 0; j < order.size(); ++j) order[j] = j;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      const auto& p = s.points[a];
      const auto& q = s.points[b];
      return p.x != q.x ? p.x < q.x : p.y < q.y;
    });
    std::vector<std::pair<double, double>> coords;
    Matrix v(static_cast<Eigen::Index>(order.size()), 1);
    for (std::size_t j = 0; j < order.size(); ++j) {
      const auto& p = s.points[order[j]];
      coords.emplace_back(p.x, p.y);
      v(static_cast<Eigen::Index>(j), 0) = p.z;
    }
    if (out.empty()) {
      reference = std::move(coords);
    } else if (coords != reference) {
      throw Error(ErrorKind::grid_mismatch, "surface '" + s.id + "' is not observed on the shared grid");
    }
    out.push_back(std::move(v));
  }
  return out;
}

std::vector<int> benchmark_raw_kmeans(std::span<const SurfaceSamples> surfaces, int K, std::uint64_t seed,
                                      int n_random, int max_iter) {
  const std::vector<Matrix> data = raw_vectors(surfaces);
  return cluster_with_selected_init(data, K, seed, n_random, max_iter).model.labels;
}

std::vector<int> proposed_kmeans(std::span<const SurfaceSamples> surfaces, int K, const SpecPtr& spec_x,
                                 const SpecPtr& spec_y, std::uint64_t seed, int n_random, int max_iter) {
  std::vector<Matrix> data;
  data.reserve(surfaces.size());
  for (auto& outcome : fit_surfaces(surfaces, spec_x, spec_y)) {
    if (outcome.error) throw *outcome.error;
    data.push_back(std::move(outcome.coefficients->values));
  }
  return cluster_with_selected_init(data, K, seed, n_random, max_iter).model.labels;
}

McReport run_monte_carlo(const ScenarioConfig& config) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();
  const int K = config.cluster_count();
  const auto spec_x = fitting_spec(config);
  const auto spec_y = spec_x;

  struct Slot {
    std::optional<std::pair<int, int>> errors;  // (proposed, benchmark)
    std::string failure;
  };
  std::vector<Slot> slots(static_cast<std::size_t>(config.runs));

  auto run_one = [&](int b) {
    Slot& slot = slots[static_cast<std::size_t>(b)];
    try {
      const auto ub = static_cast<std::uint64_t>(b);
      const Dataset data = generate_dataset(config, derive_seed(config.seed, kDataStream, ub));
      const auto proposed = proposed_kmeans(data.surfaces, K, spec_x, spec_y,
                                            derive_seed(config.seed, kProposedStream, ub), config.n_random_inits,
                                            config.max_iter);
      const auto bench = benchmark_raw_kmeans(data.surfaces, K, derive_seed(config.seed, kBenchmarkStream, ub),
                                              config.n_random_inits, config.max_iter);
      slot.errors = std::pair{misspecification(proposed, data.truth, K), misspecification(bench, data.truth, K)};
    } catch (const std::exception& e) {
      slot.failure = e.what();
    }
  };

  const int threads = std::max(1, std::min(config.threads, config.runs));
  if (threads == 1) {
    for (int b = 0; b < config.runs; ++b) run_one(b);
  } else {
    std::atomic<int> next{0};
    std::vector<std::jthread> pool;
    for (int t = 0; t < threads; ++t) {
      pool.emplace_back([&] {
        for (int b = next++; b < config.runs; b = next++) run_one(b);
      });
    }
  }

  McReport report;
  report.config = config;
  report.proposed.method = "proposed";
  report.benchmark.method = "benchmark";
  const int n = config.surface_count();
  report.proposed.errors.n = n;
  report.benchmark.errors.n = n;
  for (int b = 0; b < config.runs; ++b) {
    const Slot& slot = slots[static_cast<std::size_t>(b)];
    if (!slot.errors) {
      report.failed.push_back({b, slot.failure});
      continue;
    }
    report.runs.push_back(b);
    report.proposed.errors.per_run.push_back(slot.errors->first);
    report.benchmark.errors.per_run.push_back(slot.errors->second);
  }
  for (MethodReport* m : {&report.proposed, &report.benchmark}) {
    m->aggregate = aggregate(m->errors);
    long long total = 0;
    for (int e : m->errors.per_run) total += e;
    m->mean_misclustered =
        m->errors.per_run.empty() ? 0.0 : static_cast<double>(total) / static_cast<double>(m->errors.per_run.size());
  }
  report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

double median(std::vector<double> values) {
  if (values.empty()) throw Error(ErrorKind::empty_set, "median of nothing");
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  return values.size() % 2 == 1 ? values[mid] : 0.5 * (values[mid - 1] + values[mid]);
}

namespace {

void check_sizes(std::span<const std::size_t> sizes, int reps) {
  if (sizes.empty() || reps < 1) throw Error(ErrorKind::invalid_sizes, "need at least one size and one replicate");
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    if (sizes[i] == 0 || (i > 0 && sizes[i] <= sizes[i - 1])) {
      throw Error(ErrorKind::invalid_sizes, "sizes must be positive and strictly increasing");
    }
  }
}

Matrix fit_random_locations(const Mixture& target, std::size_t m, double noise_sd, const SpecPtr& spec, Rng& rng,
                            int& redraws) {
  const double lo = spec->domain_lo();
  const double hi = spec->domain_hi();
  for (int attempt = 0; attempt < 100; ++attempt) {
    std::vector<double> xs(m), ys(m);
    Eigen::VectorXd z(static_cast<Eigen::Index>(m));
    for (std::size_t j = 0; j < m; ++j) {
      xs[j] = rng.uniform(lo, hi);
      ys[j] = rng.uniform(lo, hi);
      z[static_cast<Eigen::Index>(j)] = mixture_density(target, xs[j], ys[j]) + noise_sd * rng.normal();
    }
    try {
      return SurfaceFitter(xs, ys, spec, spec).fit(z).values;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::rank_deficient) throw;
      ++redraws;
    }
  }
  throw Error(ErrorKind::rank_deficient, "no identifiable sample set in 100 draws of size " + std::to_string(m));
}

std::vector<Matrix> default_mixture_centers() {
  const ScenarioConfig config = ScenarioConfig::defaults(1);
  const auto spec = fitting_spec(config);
  const std::vector<double> axis = grid_axis(config);
  std::vector<double> xs, ys;
  for (double x : axis) {
    for (double y : axis) {
      xs.push_back(x);
      ys.push_back(y);
    }
  }
  const SurfaceFitter fitter(xs, ys, spec, spec);
  std::vector<Matrix> centers;
  for (const Mixture& f : {scenario_center(1, 1, 3.0), scenario_center(1, 2, 3.0)}) {
    Eigen::VectorXd z(static_cast<Eigen::Index>(xs.size()));
    for (std::size_t j = 0; j < xs.size(); ++j) z[static_cast<Eigen::Index>(j)] = mixture_density(f, xs[j], ys[j]);
    centers.push_back(fitter.fit(z).values);
  }
  return centers;
}

// Deterministic component counts proportional to the weights; entries perturbed by N(0, spread²).
std::vector<Matrix> draw_matrix_mixture(const CenterConsistencyOptions& options, const std::vector<Matrix>& centers,
                                        std::size_t n, Rng& rng) {
  double total_weight = 0.0;
  for (double w : options.weights) total_weight += w;
  std::vector<Matrix> out;
  out.reserve(n);
  double cumulative = 0.0;
  for (std::size_t k = 0; k < centers.size(); ++k) {
    cumulative += options.weights[k] / total_weight;
    const auto upto = k + 1 == centers.size() ? n : static_cast<std::size_t>(std::llround(cumulative * n));
    while (out.size() < upto) {
      Matrix m = centers[k];
      if (options.spread > 0.0) {
        for (Eigen::Index j = 0; j < m.size(); ++j) m.data()[j] += options.spread * rng.normal();
      }
      out.push_back(std::move(m));
    }
  }
  return out;
}

}  // namespace

std::vector<ConvergenceRow> coefficient_convergence(std::span<const std::size_t> sizes, int reps,
                                                    std::uint64_t seed,
                                                    const CoefficientConvergenceOptions& options) {
  check_sizes(sizes, reps);
  const auto spec = std::make_shared<const BasisSpec>(
      make_clamped_spec(options.degree, options.interior_knots, options.domain_lo, options.domain_hi));
  int ref_redraws = 0;
  Rng ref_rng(derive_seed(seed, 0, 0));
  const Matrix reference =
      fit_random_locations(options.target, options.reference_size, options.noise_sd, spec, ref_rng, ref_redraws);

  std::vector<ConvergenceRow> table;
  for (std::size_t s = 0; s < sizes.size(); ++s) {
    ConvergenceRow row;
    row.size = sizes[s];
    for (int r = 0; r < reps; ++r) {
      Rng rng(derive_seed(seed, s + 1, static_cast<std::uint64_t>(r)));
      const Matrix theta = fit_random_locations(options.target, sizes[s], options.noise_sd, spec, rng, row.redraws);
      row.distances.push_back(frobenius_distance(theta, reference));
    }
    row.median = median(row.distances);
    table.push_back(std::move(row));
  }
  return table;
}

std::vector<ConvergenceRow> center_consistency(std::span<const std::size_t> sizes, int reps, std::uint64_t seed,
                                               const CenterConsistencyOptions& options) {
  check_sizes(sizes, reps);
  const std::vector<Matrix> centers = options.centers.empty() ? default_mixture_centers() : options.centers;
  if (options.weights.size() != centers.size()) {
    throw Error(ErrorKind::invalid_config, "need one weight per mixture center");
  }
  const int K = static_cast<int>(centers.size());

  const std::size_t ref_n = options.reference_size > 0 ? options.reference_size : sizes.back();
  Rng ref_rng(derive_seed(seed, 0, 0));
  const auto ref_data = draw_matrix_mixture(options, centers, ref_n, ref_rng);
  const std::vector<Matrix> reference =
      cluster_with_selected_init(ref_data, K, derive_seed(seed, 0, 1), options.n_random_inits).model.centers;

  std::vector<ConvergenceRow> table;
  for (std::size_t s = 0; s < sizes.size(); ++s) {
    ConvergenceRow row;
    row.size = sizes[s];
    for (int r = 0; r < reps; ++r) {
      const auto ur = static_cast<std::uint64_t>(r);
      Rng rng(derive_seed(seed, 2 * s + 1, ur));
      const auto data = draw_matrix_mixture(options, centers, sizes[s], rng);
      const auto model = cluster_with_selected_init(data, K, derive_seed(seed, 2 * s + 2, ur), options.n_random_inits);
      row.distances.push_back(hausdorff(model.model.centers, reference));
    }
    row.median = median(row.distances);
    table.push_back(std::move(row));
  }
  return table;
}

}  // namespace surfclust
