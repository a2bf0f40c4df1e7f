#pragma once

#include <json.hpp>

#include "phylo/battery.hpp"

namespace phylo {

// Points are anchored on leaf paths: {"path": [a, b], "from_first": units from leaf a}.
// Leaf names follow Newick (label + 1), so documents are independent of vertex numbering.
nlohmann::json point_to_json(const RootedTree& t, Point p);
Point point_from_json(const RootedTree& t, const nlohmann::json& j);

nlohmann::json battery_to_json(const Battery& b);
// Rebuilds trees, rootings and test subtrees; the result is not re-validated.
Battery battery_from_json(const nlohmann::json& j);

}  // namespace phylo
