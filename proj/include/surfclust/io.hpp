#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "surfclust/matkmeans.hpp"
#include "surfclust/simlab.hpp"
#include "surfclust/tensorfit.hpp"

namespace surfclust {

using Json = nlohmann::ordered_json;

/// Shortest decimal text that parses back to the same double.
std::string format_double(double value);

/// CSV with header `surface_id,x,y,z`. Surfaces appear in order of first occurrence.
/// Throws parse_error naming the offending line.
std::vector<SurfaceSamples> read_surface_csv(std::istream& in, const std::string& source = "<stream>");
std::vector<SurfaceSamples> read_surface_csv(const std::filesystem::path& path);
void write_surface_csv(std::ostream& out, std::span<const SurfaceSamples> surfaces);

/// CSV with header `surface_id,label`; labels in the file are 1-based.
struct LabelTable {
  std::vector<std::string> ids;
  /// 0-based.
  std::vector<int> labels;
};

LabelTable read_label_csv(std::istream& in, const std::string& source = "<stream>");
/// Accepts a label CSV or a cluster report JSON (by `.json` extension).
LabelTable read_labels(const std::filesystem::path& path);
void write_label_csv(std::ostream& out, const LabelTable& table);

/// Writes to a sibling temporary file and renames it into place.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);
std::string read_file(const std::filesystem::path& path);

Json to_json(const BasisSpec& spec);
BasisSpec basis_spec_from_json(const Json& j);

Json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const Json& j);

/// Coefficient matrices of a batch of surfaces sharing one spec pair.
struct CoefficientSet {
  SpecPtr spec_x;
  SpecPtr spec_y;
  std::vector<std::string> ids;
  std::vector<Matrix> values;
  /// (surface id, message) for surfaces that could not be fitted.
  std::vector<std::pair<std::string, std::string>> failures;
};

Json to_json(const CoefficientSet& set);
/// Throws corrupt_input on schema violations.
CoefficientSet coefficient_set_from_json(const Json& j);

Json to_json(const ScenarioConfig& config);
Json to_json(const McReport& report);
/// Rows `method,c,run,errors` without the header.
std::string plot_rows(const McReport& report);

}  // namespace surfclust
