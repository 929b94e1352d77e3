// JSON dump of a factor graph: variables, factors and covariances.
#pragma once

#include <json.hpp>

#include "sonarloc/factor_graph.hpp"

namespace sonarloc {

nlohmann::json to_json(const FactorGraph& graph);
FactorGraph graph_from_json(const nlohmann::json& j);

nlohmann::json matrix_to_json(const MatX& m);
MatX matrix_from_json(const nlohmann::json& j);

}  // namespace sonarloc
