#pragma once

#include <vector>

#include "macgrid/entity.hpp"

namespace macgrid::testing {

inline Sentence running_sentence() {
  return {"running", {"Sever", "joint", ",", "shoulder", "and", "upper", "body", "pain", "."}};
}

inline Entity ent(std::vector<Segment> segments, std::string type) {
  return {std::move(segments), std::move(type)};
}

// Three overlapping ADE mentions plus the two POB mentions.
inline std::vector<Entity> running_gold() {
  std::vector<Entity> e = {
      ent({{0, 1}, {7, 7}}, "ADE"),
      ent({{0, 0}, {3, 3}, {7, 7}}, "ADE"),
      ent({{0, 0}, {5, 6}, {7, 7}}, "ADE"),
      ent({{5, 6}}, "POB"),
      ent({{1, 1}}, "POB"),
  };
  normalize_entities(e);
  return e;
}

}  // namespace macgrid::testing
