#pragma once

#include <string>

#include <json.hpp>

#include "webtree/correspondence.hpp"
#include "webtree/lattice.hpp"
#include "webtree/spatial_tree.hpp"

namespace webtree {

// Doubles in persisted files are rounded to 12 significant digits.
double round12(double v);

nlohmann::json tree_to_json(const FiniteSpatialTree& t);
FiniteSpatialTree tree_from_json(const nlohmann::json& j);

nlohmann::json config_to_json(const LatticeConfig& cfg);
LatticeConfig config_from_json(const nlohmann::json& j);

nlohmann::json field_to_json(const ArrowField& f, std::uint64_t max_events = 20'000'000);
// reconstructs the config; the events are regenerated from the seed and are
// bit-identical to the persisted list (checked on load)
ArrowField field_from_json(const nlohmann::json& j);

nlohmann::json report_to_json(const MetricReport& r);

// atomic file write: temp file + rename
void write_file_atomic(const std::string& path, const std::string& contents);
std::string read_file(const std::string& path);

}  // namespace webtree
