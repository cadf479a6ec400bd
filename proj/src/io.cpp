#include "surfclust/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <unistd.h>

#include "surfclust/error.hpp"

namespace surfclust {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    cells.push_back(trim(std::string_view(line).substr(start, comma == std::string::npos ? std::string::npos
                                                                                          : comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return cells;
}

[[noreturn]] void parse_fail(const std::string& source, std::size_t line_no, const std::string& what) {
  throw Error(ErrorKind::parse_error, source + ":" + std::to_string(line_no) + ": " + what);
}

double parse_real(const std::string& cell, const std::string& source, std::size_t line_no, const char* column) {
  double value = 0.0;
  const char* first = cell.data();
  const char* last = first + cell.size();
  if (!cell.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (cell.empty() || ec != std::errc() || ptr != last) {
    parse_fail(source, line_no, std::string("column '") + column + "' is not a number: '" + cell + "'");
  }
  if (!std::isfinite(value)) parse_fail(source, line_no, std::string("column '") + column + "' is not finite");
  return value;
}

bool header_matches(const std::vector<std::string>& cells, std::initializer_list<const char*> names) {
  if (cells.size() != names.size()) return false;
  std::size_t i = 0;
  for (const char* n : names) {
    if (cells[i++] != n) return false;
  }
  return true;
}

}  // namespace

std::string format_double(double value) {
  char buf[32];
  for (int precision = 15; precision <= 17; ++precision) {
    std::snprintf(buf, sizeof buf, "%.*g", precision, value);
    if (std::strtod(buf, nullptr) == value) break;
  }
  return buf;
}

std::vector<SurfaceSamples> read_surface_csv(std::istream& in, const std::string& source) {
  std::vector<SurfaceSamples> surfaces;
  std::map<std::string, std::size_t> index;
  std::string line;
  std::size_t line_no = 0;
  bool seen_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split_csv(line);
    if (!seen_header) {
      if (!header_matches(cells, {"surface_id", "x", "y", "z"})) {
        parse_fail(source, line_no, "expected header 'surface_id,x,y,z', got '" + line + "'");
      }
      seen_header = true;
      continue;
    }
    if (cells.size() != 4) {
      parse_fail(source, line_no, "expected 4 fields, got " + std::to_string(cells.size()) + " in '" + line + "'");
    }
    if (cells[0].empty()) parse_fail(source, line_no, "empty surface_id");
    const SamplePoint p{parse_real(cells[1], source, line_no, "x"), parse_real(cells[2], source, line_no, "y"),
                        parse_real(cells[3], source, line_no, "z")};
    auto [it, inserted] = index.emplace(cells[0], surfaces.size());
    if (inserted) surfaces.push_back({cells[0], {}});
    surfaces[it->second].points.push_back(p);
  }
  if (!seen_header) parse_fail(source, line_no, "missing header");
  return surfaces;
}

std::vector<SurfaceSamples> read_surface_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io_error, "cannot open '" + path.string() + "'");
  return read_surface_csv(in, path.string());
}

void write_surface_csv(std::ostream& out, std::span<const SurfaceSamples> surfaces) {
  out << "surface_id,x,y,z\n";
  for (const auto& s : surfaces) {
    for (const auto& p : s.points) {
      out << s.id << ',' << format_double(p.x) << ',' << format_double(p.y) << ',' << format_double(p.z) << '\n';
    }
  }
}

LabelTable read_label_csv(std::istream& in, const std::string& source) {
  LabelTable table;
  std::string line;
  std::size_t line_no = 0;
  bool seen_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split_csv(line);
    if (!seen_header) {
      if (!header_matches(cells, {"surface_id", "label"})) {
        parse_fail(source, line_no, "expected header 'surface_id,label', got '" + line + "'");
      }
      seen_header = true;
      continue;
    }
    if (cells.size() != 2) parse_fail(source, line_no, "expected 2 fields in '" + line + "'");
    int label = 0;
    const auto [ptr, ec] = std::from_chars(cells[1].data(), cells[1].data() + cells[1].size(), label);
    if (cells[1].empty() || ec != std::errc() || ptr != cells[1].data() + cells[1].size()) {
      parse_fail(source, line_no, "label is not an integer: '" + cells[1] + "'");
    }
    if (label < 1) {
      throw Error(ErrorKind::label_out_of_range,
                  source + ":" + std::to_string(line_no) + ": labels start at 1, got " + cells[1]);
    }
    table.ids.push_back(cells[0]);
    table.labels.push_back(label - 1);
  }
  if (!seen_header) parse_fail(source, line_no, "missing header");
  return table;
}

LabelTable read_labels(const std::filesystem::path& path) {
  if (path.extension() == ".json") {
    const Json j = Json::parse(read_file(path), nullptr, false);
    if (j.is_discarded() || !j.contains("surfaces") || !j["surfaces"].is_array()) {
      throw Error(ErrorKind::corrupt_input, "'" + path.string() + "' is not a cluster report");
    }
    LabelTable table;
    for (const auto& s : j["surfaces"]) {
      if (!s.contains("id") || !s.contains("label") || !s["label"].is_number_integer() || s["label"].get<int>() < 1) {
        throw Error(ErrorKind::corrupt_input, "bad surface entry in '" + path.string() + "'");
      }
      table.ids.push_back(s["id"].get<std::string>());
      table.labels.push_back(s["label"].get<int>() - 1);
    }
    return table;
  }
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io_error, "cannot open '" + path.string() + "'");
  return read_label_csv(in, path.string());
}

void write_label_csv(std::ostream& out, const LabelTable& table) {
  out << "surface_id,label\n";
  for (std::size_t i = 0; i < table.ids.size(); ++i) out << table.ids[i] << ',' << table.labels[i] + 1 << '\n';
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp" + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::io_error, "cannot write '" + tmp.string() + "'");
    out << content;
    if (!out.flush()) throw Error(ErrorKind::io_error, "short write to '" + tmp.string() + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw Error(ErrorKind::io_error, "cannot move output into '" + path.string() + "': " + ec.message());
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::io_error, "cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Json to_json(const BasisSpec& spec) {
  return Json{{"degree", spec.degree()},
              {"knots", spec.knots()},
              {"domain", {spec.domain_lo(), spec.domain_hi()}},
              {"basis_count", spec.basis_count()}};
}

BasisSpec basis_spec_from_json(const Json& j) {
  try {
    return BasisSpec(j.at("degree").get<int>(), j.at("knots").get<std::vector<double>>());
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::corrupt_input, std::string("bad basis spec: ") + e.what());
  } catch (const Error& e) {
    throw Error(ErrorKind::corrupt_input, "bad basis spec: " + e.detail());
  }
}

Json matrix_to_json(const Matrix& m) {
  std::vector<double> values(m.data(), m.data() + m.size());
  return Json{{"rows", m.rows()}, {"cols", m.cols()}, {"values", values}};
}

Matrix matrix_from_json(const Json& j) {
  try {
    const auto rows = j.at("rows").get<Eigen::Index>();
    const auto cols = j.at("cols").get<Eigen::Index>();
    const auto values = j.at("values").get<std::vector<double>>();
    if (rows < 1 || cols < 1 || static_cast<Eigen::Index>(values.size()) != rows * cols) {
      throw Error(ErrorKind::corrupt_input, "matrix size does not match its values");
    }
    return Eigen::Map<const Matrix>(values.data(), rows, cols);
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::corrupt_input, std::string("bad matrix: ") + e.what());
  }
}

Json to_json(const CoefficientSet& set) {
  Json surfaces = Json::array();
  for (std::size_t i = 0; i < set.ids.size(); ++i) {
    Json s = matrix_to_json(set.values[i]);
    s["id"] = set.ids[i];
    surfaces.push_back(std::move(s));
  }
  Json failures = Json::array();
  for (const auto& [id, message] : set.failures) failures.push_back({{"id", id}, {"error", message}});
  return Json{{"format", "surfclust-coefficients"},
              {"layout", "column-major"},
              {"spec_x", to_json(*set.spec_x)},
              {"spec_y", to_json(*set.spec_y)},
              {"surfaces", std::move(surfaces)},
              {"failures", std::move(failures)}};
}

CoefficientSet coefficient_set_from_json(const Json& j) {
  if (!j.is_object() || j.value("format", "") != "surfclust-coefficients") {
    throw Error(ErrorKind::corrupt_input, "not a coefficient file");
  }
  CoefficientSet set;
  set.spec_x = std::make_shared<const BasisSpec>(basis_spec_from_json(j.at("spec_x")));
  set.spec_y = std::make_shared<const BasisSpec>(basis_spec_from_json(j.at("spec_y")));
  if (!j.contains("surfaces") || !j["surfaces"].is_array()) throw Error(ErrorKind::corrupt_input, "missing surfaces");
  for (const auto& s : j["surfaces"]) {
    if (!s.contains("id") || !s["id"].is_string()) throw Error(ErrorKind::corrupt_input, "surface without id");
    Matrix m = matrix_from_json(s);
    if (m.rows() != set.spec_x->basis_count() || m.cols() != set.spec_y->basis_count()) {
      throw Error(ErrorKind::corrupt_input, "coefficients of '" + s["id"].get<std::string>() +
                                                "' do not match the basis specs");
    }
    set.ids.push_back(s["id"].get<std::string>());
    set.values.push_back(std::move(m));
  }
  if (j.contains("failures")) {
    for (const auto& f : j["failures"]) set.failures.emplace_back(f.value("id", ""), f.value("error", ""));
  }
  return set;
}

Json to_json(const ScenarioConfig& config) {
  return Json{{"scenario", config.scenario},
              {"c", config.c},
              {"n_per_cluster", config.n_per_cluster},
              {"grid_points_per_axis", config.grid_points_per_axis},
              {"domain", {config.domain_lo, config.domain_hi}},
              {"noise_sd", config.noise_sd},
              {"runs", config.runs},
              {"seed", config.seed},
              {"degree", config.degree},
              {"interior_knots", config.interior_knots},
              {"n_random_inits", config.n_random_inits},
              {"max_iter", config.max_iter}};
}

Json to_json(const McReport& report) {
  auto method = [](const MethodReport& m) {
    long long total = 0;
    for (int e : m.errors.per_run) total += e;
    return Json{{"per_run", m.errors.per_run},
                {"n", m.errors.n},
                {"total_errors", total},
                {"nu", m.aggregate.nu},
                {"phi", m.aggregate.phi},
                {"mean_misclustered", m.mean_misclustered}};
  };
  Json failed = Json::array();
  for (const auto& f : report.failed) failed.push_back({{"run", f.run}, {"error", f.error}});
  return Json{{"config", to_json(report.config)},
              {"rng", "mt19937_64, Box-Muller normals; run b uses derive_seed(seed, stream, b) with streams "
                      "1=data 2=proposed-init 3=benchmark-init"},
              {"benchmark_vector_order", "x-index outer, y-index inner"},
              {"runs_completed", report.runs},
              {"proposed", method(report.proposed)},
              {"benchmark", method(report.benchmark)},
              {"failed_runs", std::move(failed)},
              {"timings", {{"seconds", report.seconds}}}};
}

std::string plot_rows(const McReport& report) {
  std::string rows;
  for (const MethodReport* m : {&report.proposed, &report.benchmark}) {
    for (std::size_t i = 0; i < m->errors.per_run.size(); ++i) {
      rows += m->method + ',' + format_double(report.config.c) + ',' + std::to_string(report.runs[i] + 1) + ',' +
              std::to_string(m->errors.per_run[i]) + '\n';
    }
  }
  return rows;
}

}  // namespace surfclust
