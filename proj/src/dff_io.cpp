#include "diffeoflow/dff_io.hpp"

#include "diffeoflow/json_text.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>

namespace diffeoflow {

DisplacementField DffData::displacement() const {
  if (static_cast<int>(components.size()) != grid.dim())
    throw DimensionMismatch("dff file holds " + std::to_string(components.size()) +
                            " components, a displacement needs " + std::to_string(grid.dim()));
  return DisplacementField(components);
}

void write_dff(std::ostream& out, const std::vector<ScalarField>& components,
               std::optional<DecayClass> class_hint) {
  if (components.empty()) throw InvalidArgument("dff file needs at least one component");
  const Grid& grid = components.front().grid();
  Json header;
  header["format"] = "dff-v1";
  header["dim"] = grid.dim();
  header["half_width"] = grid.half_width();
  header["points_per_axis"] = grid.points_per_axis();
  header["class_hint"] = class_hint ? Json(std::string(to_string(*class_hint))) : Json(nullptr);
  header["components"] = components.size();
  out << dump_json(header, -1) << '\n';
  char buf[40];
  for (const auto& c : components) {
    if (!(c.grid() == grid)) throw DimensionMismatch("components live on different grids");
    const auto& s = c.samples();
    for (Eigen::Index i = 0; i < s.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.17g", s[i]);
      if (i) out << ',';
      out << buf;
    }
    out << '\n';
  }
  if (!out) throw IoError("failed writing dff data");
}

void write_dff(const std::string& path, const std::vector<ScalarField>& components,
               std::optional<DecayClass> class_hint) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  write_dff(out, components, class_hint);
}

DffData read_dff(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("dff: missing header line");
  Json header;
  try {
    header = Json::parse(line);
  } catch (const Json::exception& e) {
    throw ParseError(std::string("dff: header is not valid JSON: ") + e.what());
  }
  int dim = 0, points = 0, count = 0;
  double half_width = 0.0;
  std::optional<DecayClass> hint;
  try {
    if (header.contains("format") && header.at("format") != "dff-v1")
      throw ParseError("dff: unsupported format " + header.at("format").dump());
    dim = header.at("dim").get<int>();
    half_width = header.at("half_width").get<double>();
    points = header.at("points_per_axis").get<int>();
    count = header.at("components").get<int>();
    if (header.contains("class_hint") && !header.at("class_hint").is_null()) {
      const auto name = header.at("class_hint").get<std::string>();
      hint = parse_decay_class(name);
      if (!hint) throw ParseError("dff: unknown class_hint '" + name + "'");
    }
  } catch (const Json::exception& e) {
    throw ParseError(std::string("dff: bad header field: ") + e.what());
  }
  if (count < 1) throw ParseError("dff: components must be positive");
  std::optional<Grid> grid;
  try {
    grid.emplace(dim, half_width, points);
  } catch (const InvalidArgument& e) {
    throw ParseError(std::string("dff: invalid grid: ") + e.what());
  }

  DffData data{*grid, hint, {}};
  const auto expected = static_cast<Eigen::Index>(grid->node_count());
  for (int c = 0; c < count; ++c) {
    if (!std::getline(in, line))
      throw ParseError("dff: expected " + std::to_string(count) + " component rows, found " + std::to_string(c));
    Eigen::VectorXd samples(expected);
    Eigen::Index k = 0;
    const char* p = line.c_str();
    while (*p != '\0' && *p != '\r') {
      char* end = nullptr;
      errno = 0;
      const double v = std::strtod(p, &end);
      if (end == p || (errno == ERANGE && std::isinf(v)))
        throw ParseError("dff: bad number in component " + std::to_string(c) + " at sample " + std::to_string(k));
      if (k >= expected)
        throw ParseError("dff: component " + std::to_string(c) + " has more than " + std::to_string(expected) + " samples");
      samples[k++] = v;
      p = end;
      if (*p == ',') ++p;
      else if (*p != '\0' && *p != '\r')
        throw ParseError("dff: unexpected character in component " + std::to_string(c));
    }
    if (k != expected)
      throw ParseError("dff: component " + std::to_string(c) + " has " + std::to_string(k) + " samples, expected " +
                       std::to_string(expected));
    try {
      data.components.emplace_back(*grid, std::move(samples));
    } catch (const NonFiniteSample& e) {
      throw ParseError(std::string("dff: ") + e.what());
    }
  }
  while (std::getline(in, line))
    if (!line.empty() && line != "\r") throw ParseError("dff: trailing data after the last component");
  return data;
}

DffData read_dff(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  return read_dff(in);
}

}  // namespace diffeoflow
