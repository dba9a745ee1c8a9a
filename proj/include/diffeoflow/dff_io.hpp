#pragma once

#include "diffeoflow/field.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace diffeoflow {

/// Contents of a dff-v1 file: a JSON header line
/// {"format","dim","half_width","points_per_axis","class_hint","components"}
/// followed by one CSV row of row-major samples per component.
struct DffData {
  Grid grid;
  std::optional<DecayClass> class_hint;
  std::vector<ScalarField> components;

  DisplacementField displacement() const;
};

void write_dff(std::ostream& out, const std::vector<ScalarField>& components,
               std::optional<DecayClass> class_hint = std::nullopt);
void write_dff(const std::string& path, const std::vector<ScalarField>& components,
               std::optional<DecayClass> class_hint = std::nullopt);

/// Throws ParseError on malformed headers, bad numbers or mismatched sample counts.
DffData read_dff(std::istream& in);
DffData read_dff(const std::string& path);

}  // namespace diffeoflow
