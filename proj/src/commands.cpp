#include "surfclust/commands.hpp"

#include <algorithm>
#include <map>
#include <ostream>
#include <sstream>

#include "surfclust/error.hpp"

namespace surfclust {

namespace {

std::filesystem::path manifest_path(const std::filesystem::path& output) {
  auto p = output;
  p += ".manifest.json";
  return p;
}

Json manifest(const std::string& command, Json args) {
  return Json{{"tool", "surfclust"}, {"version", kVersion}, {"command", command}, {"args", std::move(args)}};
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

int report_error(const Error& e, std::ostream& err) {
  err << "error: " << e.what() << '\n';
  if (e.kind() == ErrorKind::invalid_config) return kExitUsage;
  return is_numerical(e.kind()) ? kExitNumerical : kExitData;
}

template <class F>
int guarded(std::ostream& err, F&& body) {
  try {
    return body();
  } catch (const Error& e) {
    return report_error(e, err);
  } catch (const Json::exception& e) {
    err << "error: corrupt-input: " << e.what() << '\n';
    return kExitData;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: io-error: " << e.what() << '\n';
    return kExitData;
  }
}

template <class T>
T field(const Json& j, const char* name, T fallback) {
  return j.contains(name) ? j.at(name).get<T>() : fallback;
}

}  // namespace

Json to_json(const FitArgs& a) {
  return Json{{"input", a.input.string()},
              {"output", a.output.string()},
              {"degree", a.degree},
              {"interior_knots", a.interior_knots}};
}

Json to_json(const ClusterArgs& a) {
  return Json{{"input", a.input.string()}, {"output", a.output.string()}, {"k", a.k},
              {"seed", a.seed},            {"n_random_inits", a.n_random_inits}, {"max_iter", a.max_iter}};
}

Json to_json(const SimulateArgs& a) {
  Json j{{"scenario", a.scenario}, {"c", a.c},     {"runs", a.runs},     {"seed", a.seed},
         {"degree", a.degree},     {"interior_knots", a.interior_knots}, {"noise_sd", nullptr},
         {"threads", a.threads},   {"output", a.output.string()}};
  if (a.noise_sd) j["noise_sd"] = *a.noise_sd;
  return j;
}

Json to_json(const EvaluateArgs& a) {
  return Json{{"pred", a.pred.string()}, {"truth", a.truth.string()}, {"output", a.output.string()}};
}

Json to_json(const GenerateArgs& a) {
  Json j{{"scenario", a.scenario},          {"c", a.c},
         {"seed", a.seed},                  {"noise_sd", nullptr},
         {"output", a.output.string()},     {"truth_output", a.truth_output.string()}};
  if (a.noise_sd) j["noise_sd"] = *a.noise_sd;
  return j;
}

int cmd_fit(const FitArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto surfaces = read_surface_csv(args.input);
    if (surfaces.empty()) throw Error(ErrorKind::insufficient_data, "no surfaces in '" + args.input.string() + "'");
    const auto [xr, yr] = observed_domain(surfaces);
    const auto spec_x = std::make_shared<const BasisSpec>(
        make_clamped_spec(args.degree, args.interior_knots, xr.first, xr.second));
    const auto spec_y = std::make_shared<const BasisSpec>(
        make_clamped_spec(args.degree, args.interior_knots, yr.first, yr.second));

    CoefficientSet set{spec_x, spec_y, {}, {}, {}};
    auto outcomes = fit_surfaces(surfaces, spec_x, spec_y);
    for (std::size_t i = 0; i < outcomes.size(); ++i) {
      if (outcomes[i].coefficients) {
        set.ids.push_back(surfaces[i].id);
        set.values.push_back(std::move(outcomes[i].coefficients->values));
      } else {
        set.failures.emplace_back(surfaces[i].id, outcomes[i].error->what());
        err << "warning: " << outcomes[i].error->what() << '\n';
      }
    }
    write_file_atomic(args.output, dump(to_json(set)));
    write_file_atomic(manifest_path(args.output), dump(manifest("fit", to_json(args))));
    out << "fitted " << set.ids.size() << " of " << surfaces.size() << " surfaces (" << spec_x->basis_count() << "x"
        << spec_y->basis_count() << " coefficients) -> " << args.output.string() << '\n';
    return set.failures.empty() ? kExitOk : kExitNumerical;
  });
}

int cmd_cluster(const ClusterArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const Json input = Json::parse(read_file(args.input), nullptr, false);
    if (input.is_discarded()) throw Error(ErrorKind::corrupt_input, "'" + args.input.string() + "' is not JSON");
    const CoefficientSet set = coefficient_set_from_json(input);
    if (args.k < 1 || static_cast<std::size_t>(args.k) > set.values.size()) {
      throw Error(ErrorKind::insufficient_data, "K = " + std::to_string(args.k) + " with " +
                                                    std::to_string(set.values.size()) + " surfaces");
    }
    const auto result = cluster_with_selected_init(set.values, args.k, args.seed, args.n_random_inits, args.max_iter);
    const ClusterModel& model = result.model;

    Json surfaces = Json::array();
    for (std::size_t i = 0; i < set.ids.size(); ++i) {
      surfaces.push_back({{"id", set.ids[i]}, {"label", model.labels[i] + 1}});
    }
    Json centers = Json::array();
    for (const auto& c : model.centers) centers.push_back(matrix_to_json(c));
    const Json report{{"format", "surfclust-clusters"},
                      {"k", args.k},
                      {"seed", args.seed},
                      {"init",
                       {{"method", to_string(result.init.method)},
                        {"note", result.init.note},
                        {"candidate_index", result.init_index},
                        {"indices", result.init.indices}}},
                      {"objective", model.objective},
                      {"mean_squared_distance", model.mean_squared_distance},
                      {"iterations", model.iterations},
                      {"converged", model.converged},
                      {"surfaces", std::move(surfaces)},
                      {"centers", std::move(centers)}};
    write_file_atomic(args.output, dump(report));
    write_file_atomic(manifest_path(args.output), dump(manifest("cluster", to_json(args))));
    out << "clustered " << set.ids.size() << " surfaces into " << args.k << " groups, objective "
        << format_double(model.objective) << ", init " << to_string(result.init.method) << " -> "
        << args.output.string() << '\n';
    return kExitOk;
  });
}

ScenarioConfig scenario_config(const SimulateArgs& args, double c) {
  ScenarioConfig config = ScenarioConfig::defaults(args.scenario);
  config.c = c;
  config.runs = args.runs;
  config.seed = args.seed;
  config.degree = args.degree;
  config.interior_knots = args.interior_knots;
  config.threads = args.threads;
  if (args.noise_sd) std::fill(config.noise_sd.begin(), config.noise_sd.end(), *args.noise_sd);
  config.validate();
  return config;
}

int cmd_simulate(const SimulateArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (args.c.empty()) throw Error(ErrorKind::invalid_config, "at least one --c value is required");
    std::vector<ScenarioConfig> configs;
    for (double c : args.c) configs.push_back(scenario_config(args, c));

    Json results = Json::array();
    std::string plot = "method,c,run,errors\n";
    for (const auto& config : configs) {
      const McReport report = run_monte_carlo(config);
      results.push_back(to_json(report));
      plot += plot_rows(report);
      out << "scenario " << config.scenario << " c=" << format_double(config.c) << ": proposed mean "
          << format_double(report.proposed.mean_misclustered) << ", benchmark mean "
          << format_double(report.benchmark.mean_misclustered) << " (" << report.runs.size() << " runs";
      if (!report.failed.empty()) out << ", " << report.failed.size() << " failed";
      out << ")\n";
    }
    const Json doc{{"tool", "surfclust"}, {"version", kVersion}, {"results", std::move(results)}};
    write_file_atomic(args.output / "report.json", dump(doc));
    write_file_atomic(args.output / "errors.csv", plot);
    write_file_atomic(args.output / "manifest.json", dump(manifest("simulate", to_json(args))));
    return kExitOk;
  });
}

int cmd_evaluate(const EvaluateArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const LabelTable pred = read_labels(args.pred);
    const LabelTable truth = read_labels(args.truth);
    if (pred.labels.size() != truth.labels.size()) {
      throw Error(ErrorKind::length_mismatch, std::to_string(pred.labels.size()) + " predicted vs " +
                                                  std::to_string(truth.labels.size()) + " true labels");
    }
    // Align by id when the files list surfaces in different orders.
    std::vector<int> aligned = truth.labels;
    if (pred.ids != truth.ids) {
      std::map<std::string, int> by_id;
      for (std::size_t i = 0; i < truth.ids.size(); ++i) by_id[truth.ids[i]] = truth.labels[i];
      for (std::size_t i = 0; i < pred.ids.size(); ++i) {
        const auto it = by_id.find(pred.ids[i]);
        if (it == by_id.end()) {
          throw Error(ErrorKind::length_mismatch, "surface '" + pred.ids[i] + "' has no true label");
        }
        aligned[i] = it->second;
      }
    }
    int K = 1;
    for (int l : pred.labels) K = std::max(K, l + 1);
    for (int l : aligned) K = std::max(K, l + 1);
    const int errors = misspecification(pred.labels, aligned, K);
    const ErrorAggregate agg = aggregate(RunErrors{{errors}, static_cast<int>(pred.labels.size())});
    const Json result{{"misspecification", errors},
                      {"nu", agg.nu},
                      {"phi", agg.phi},
                      {"n", pred.labels.size()},
                      {"k", K}};
    out << "misspecification " << errors << " of " << pred.labels.size() << ", nu " << format_double(agg.nu)
        << ", phi " << format_double(agg.phi) << '\n';
    if (!args.output.empty()) {
      write_file_atomic(args.output, dump(result));
      write_file_atomic(manifest_path(args.output), dump(manifest("evaluate", to_json(args))));
    }
    return kExitOk;
  });
}

int cmd_generate(const GenerateArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    ScenarioConfig config = ScenarioConfig::defaults(args.scenario);
    config.c = args.c;
    config.seed = args.seed;
    if (args.noise_sd) std::fill(config.noise_sd.begin(), config.noise_sd.end(), *args.noise_sd);
    const Dataset data = generate_dataset(config, args.seed);
    std::ostringstream csv;
    write_surface_csv(csv, data.surfaces);
    write_file_atomic(args.output, csv.str());
    if (!args.truth_output.empty()) {
      LabelTable truth;
      for (std::size_t i = 0; i < data.surfaces.size(); ++i) {
        truth.ids.push_back(data.surfaces[i].id);
        truth.labels.push_back(data.truth[i]);
      }
      std::ostringstream labels;
      write_label_csv(labels, truth);
      write_file_atomic(args.truth_output, labels.str());
    }
    write_file_atomic(manifest_path(args.output), dump(manifest("generate", to_json(args))));
    out << "generated " << data.surfaces.size() << " surfaces -> " << args.output.string() << '\n';
    return kExitOk;
  });
}

int cmd_rerun(const std::filesystem::path& path, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const Json m = Json::parse(read_file(path), nullptr, false);
    if (m.is_discarded() || !m.contains("command") || !m.contains("args")) {
      throw Error(ErrorKind::corrupt_input, "'" + path.string() + "' is not a run manifest");
    }
    const Json& a = m["args"];
    const std::string command = m["command"].get<std::string>();
    auto optional_real = [&](const char* name) -> std::optional<double> {
      if (!a.contains(name) || a[name].is_null()) return std::nullopt;
      return a[name].get<double>();
    };
    if (command == "fit") {
      FitArgs f;
      f.input = a.at("input").get<std::string>();
      f.output = a.at("output").get<std::string>();
      f.degree = field(a, "degree", f.degree);
      f.interior_knots = field(a, "interior_knots", f.interior_knots);
      return cmd_fit(f, out, err);
    }
    if (command == "cluster") {
      ClusterArgs c;
      c.input = a.at("input").get<std::string>();
      c.output = a.at("output").get<std::string>();
      c.k = field(a, "k", c.k);
      c.seed = field(a, "seed", c.seed);
      c.n_random_inits = field(a, "n_random_inits", c.n_random_inits);
      c.max_iter = field(a, "max_iter", c.max_iter);
      return cmd_cluster(c, out, err);
    }
    if (command == "simulate") {
      SimulateArgs s;
      s.scenario = field(a, "scenario", s.scenario);
      s.c = field(a, "c", s.c);
      s.runs = field(a, "runs", s.runs);
      s.seed = field(a, "seed", s.seed);
      s.degree = field(a, "degree", s.degree);
      s.interior_knots = field(a, "interior_knots", s.interior_knots);
      s.noise_sd = optional_real("noise_sd");
      s.threads = field(a, "threads", s.threads);
      s.output = a.at("output").get<std::string>();
      return cmd_simulate(s, out, err);
    }
    if (command == "evaluate") {
      EvaluateArgs e;
      e.pred = a.at("pred").get<std::string>();
      e.truth = a.at("truth").get<std::string>();
      e.output = field<std::string>(a, "output", "");
      return cmd_evaluate(e, out, err);
    }
    if (command == "generate") {
      GenerateArgs g;
      g.scenario = field(a, "scenario", g.scenario);
      g.c = field(a, "c", g.c);
      g.seed = field(a, "seed", g.seed);
      g.noise_sd = optional_real("noise_sd");
      g.output = a.at("output").get<std::string>();
      g.truth_output = field<std::string>(a, "truth_output", "");
      return cmd_generate(g, out, err);
    }
    throw Error(ErrorKind::corrupt_input, "unknown command '" + command + "' in manifest");
  });
}

}  // namespace surfclust
