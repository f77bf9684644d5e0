#include "webtree/json_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace webtree {

using nlohmann::json;

double round12(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return std::strtod(buf, nullptr);
}

json tree_to_json(const FiniteSpatialTree& t) {
    const FiniteMetricTree dense = t.tree().materialized();
    json j;
    json points = json::array();
    for (std::size_t i = 0; i < dense.size(); ++i) points.push_back(i);
    j["points"] = std::move(points);
    json dist = json::array();
    for (double d : dense.matrix()) dist.push_back(round12(d));
    j["dist"] = std::move(dist);
    j["base"] = dense.base();
    json ev = json::array();
    for (const SpacePoint& p : t.eval()) ev.push_back({round12(p.t), round12(p.x)});
    j["eval"] = std::move(ev);
    j["space_mode"] = t.mode() == SpaceMode::circle ? "circle" : "line";
    j["alpha"] = t.alpha();
    j["spread_radius"] = t.spread_radius();
    j["truncated"] = dense.truncated();
    return j;
}

FiniteSpatialTree tree_from_json(const json& j) {
    const std::size_t n = j.at("points").size();
    std::vector<double> dist;
    for (const auto& d : j.at("dist")) dist.push_back(d.get<double>());
    if (dist.size() != n * n)
        throw std::invalid_argument("tree json: dist is not a square matrix");
    FiniteMetricTree tr = FiniteMetricTree::from_matrix(std::move(dist), n,
                                                        j.at("base").get<std::size_t>());
    if (j.contains("truncated")) tr.set_truncated(j["truncated"].get<bool>());
    std::vector<SpacePoint> ev;
    for (const auto& e : j.at("eval")) ev.push_back({e.at(0).get<double>(), e.at(1).get<double>()});
    const SpaceMode mode =
        j.at("space_mode").get<std::string>() == "circle" ? SpaceMode::circle : SpaceMode::line;
    const double spread = j.contains("spread_radius") ? j["spread_radius"].get<double>() : 1.0;
    return FiniteSpatialTree(std::move(tr), std::move(ev), mode,
                             j.at("alpha").get<double>(), spread);
}

json config_to_json(const LatticeConfig& cfg) {
    json j;
    j["delta"] = cfg.delta;
    j["t_lo"] = cfg.t_lo;
    j["t_hi"] = cfg.t_hi;
    j["x_lo"] = cfg.x_lo;
    j["x_hi"] = cfg.x_hi;
    j["mode"] = cfg.mode == SpaceMode::circle ? "circle" : "line";
    j["seed"] = cfg.seed;
    return j;
}

LatticeConfig config_from_json(const json& j) {
    LatticeConfig cfg;
    cfg.delta = j.at("delta").get<double>();
    cfg.t_lo = j.at("t_lo").get<double>();
    cfg.t_hi = j.at("t_hi").get<double>();
    cfg.x_lo = j.value("x_lo", -2.0);
    cfg.x_hi = j.value("x_hi", 2.0);
    cfg.mode = j.at("mode").get<std::string>() == "circle" ? SpaceMode::circle
                                                           : SpaceMode::line;
    cfg.seed = j.at("seed").get<std::uint64_t>();
    cfg.validate();
    return cfg;
}

json field_to_json(const ArrowField& f, std::uint64_t max_events) {
    json j;
    j["config"] = config_to_json(f.config());
    json events = json::array();
    for (const ArrowEvent& e : f.materialize(max_events))
        events.push_back({round12(e.t), e.site, e.dir == ArrowDir::R ? "R" : "L"});
    j["events"] = std::move(events);
    return j;
}

ArrowField field_from_json(const json& j) {
    ArrowField f(config_from_json(j.at("config")));
    if (j.contains("events")) {
        const auto regenerated = f.materialize();
        if (regenerated.size() != j["events"].size())
            throw std::invalid_argument("realization file does not match its seed");
    }
    return f;
}

json report_to_json(const MetricReport& r) {
    json j;
    j["value"] = r.value;
    j["exact"] = r.exact;
    j["tail_bound"] = r.tail_bound;
    json w = json::array();
    for (const auto& [a, b] : r.witness.pairs) w.push_back({a, b});
    j["witness_pairs"] = std::move(w);
    return j;
}

void write_file_atomic(const std::string& path, const std::string& contents) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open " + tmp + " for writing");
        out << contents;
        if (!out) throw std::runtime_error("short write to " + tmp);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0)
        throw std::runtime_error("cannot rename " + tmp + " to " + path);
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace webtree
