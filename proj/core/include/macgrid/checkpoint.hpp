#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "macgrid/scorer.hpp"

namespace macgrid {

inline constexpr std::string_view kCheckpointFormat = "macgrid-checkpoint";
inline constexpr int kCheckpointVersion = 1;

struct Checkpoint {
  Model model;
  double threshold = Threshold::kDefault;
  // Free-form key/value echo of how the model was produced.
  std::vector<std::pair<std::string, std::string>> provenance;
};

// JSON document; field names are listed in docs/formats.md. Doubles are
// written with enough digits to round-trip exactly.
void save_checkpoint(std::ostream& out, const Checkpoint& checkpoint);
std::string checkpoint_to_string(const Checkpoint& checkpoint);

// Throws InputError for a malformed document, a foreign format tag, an
// unsupported version or a tensor whose shape does not match the config.
Checkpoint load_checkpoint(std::istream& in);
Checkpoint checkpoint_from_string(const std::string& text);

}  // namespace macgrid
