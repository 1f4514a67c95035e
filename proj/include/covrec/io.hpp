#pragma once

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "covrec/geometry.hpp"
#include "covrec/placement.hpp"
#include "covrec/recovery.hpp"

namespace covrec {

struct io_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Serialized network state: field names a, r, kind, existing, boundary are
/// part of the file contract.
struct NetworkFile {
    double a = 1.0;
    double r = 0.25;
    ComplexKind kind = ComplexKind::Rips;
    std::vector<Point2> existing;
    std::optional<std::vector<Point2>> boundary;
};

/// Coordinates are written as decimals with 12 significant digits; values
/// that round-trip through a file stay bit-identical on the next write.
inline double quantize12(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return std::strtod(buf, nullptr);
}

namespace detail {

inline std::vector<Point2> parse_points(const nlohmann::json& j, const std::string& field,
                                        double side) {
    if (!j.is_array()) throw io_error(field + ": expected an array of [x,y] pairs");
    std::vector<Point2> out;
    out.reserve(j.size());
    for (std::size_t i = 0; i < j.size(); ++i) {
        const auto& e = j[i];
        const std::string where = field + "[" + std::to_string(i) + "]";
        if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number())
            throw io_error(where + ": expected [x,y]");
        const Point2 p{e[0].get<double>(), e[1].get<double>()};
        if (!std::isfinite(p.x) || !std::isfinite(p.y)) throw io_error(where + ": non-finite coordinate");
        if (p.x < 0.0 || p.x > side || p.y < 0.0 || p.y > side)
            throw io_error(where + ": point outside the domain square");
        out.push_back(p);
    }
    return out;
}

inline nlohmann::json points_to_json(const std::vector<Point2>& pts) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& p : pts) arr.push_back({quantize12(p.x), quantize12(p.y)});
    return arr;
}

}  // namespace detail

/// Point list as a JSON array of [x,y] pairs, coordinates quantized.
inline nlohmann::json points_json(const std::vector<Point2>& pts) { return detail::points_to_json(pts); }

inline NetworkFile parse_network(const std::string& text) {
    NetworkFile net;
    // an empty or whitespace-only file is an empty network with defaults
    if (text.find_first_not_of(" \t\r\n") == std::string::npos) return net;
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw io_error(std::string("invalid JSON: ") + e.what());
    }
    if (!j.is_object()) throw io_error("network file: expected a JSON object");
    if (j.contains("a")) {
        if (!j["a"].is_number() || !(j["a"].get<double>() > 0.0)) throw io_error("a: expected a number > 0");
        net.a = j["a"].get<double>();
    }
    if (j.contains("r")) {
        if (!j["r"].is_number() || !(j["r"].get<double>() > 0.0)) throw io_error("r: expected a number > 0");
        net.r = j["r"].get<double>();
    }
    if (j.contains("kind")) {
        if (!j["kind"].is_string()) throw io_error("kind: expected \"rips\" or \"cech\"");
        const std::string k = j["kind"].get<std::string>();
        if (k == "rips") net.kind = ComplexKind::Rips;
        else if (k == "cech") net.kind = ComplexKind::Cech;
        else throw io_error("kind: expected \"rips\" or \"cech\"");
    }
    if (j.contains("existing")) net.existing = detail::parse_points(j["existing"], "existing", net.a);
    if (j.contains("boundary")) net.boundary = detail::parse_points(j["boundary"], "boundary", net.a);
    for (const auto& [key, value] : j.items()) {
        (void)value;
        if (key != "a" && key != "r" && key != "kind" && key != "existing" && key != "boundary")
            throw io_error(key + ": unknown field");
    }
    return net;
}

inline NetworkFile load_network(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_network(buf.str());
}

inline std::string serialize_network(const NetworkFile& net) {
    nlohmann::json j;
    j["a"] = quantize12(net.a);
    j["r"] = quantize12(net.r);
    j["kind"] = net.kind == ComplexKind::Cech ? "cech" : "rips";
    j["existing"] = detail::points_to_json(net.existing);
    if (net.boundary) j["boundary"] = detail::points_to_json(*net.boundary);
    return j.dump(2) + "\n";
}

inline void write_file(const std::string& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw io_error("cannot write " + path);
    out << contents;
}

inline std::vector<Point2> positions_of(const std::vector<TaggedPoint>& pts) {
    std::vector<Point2> out;
    out.reserve(pts.size());
    for (const auto& p : pts) out.push_back(p.pos);
    return out;
}

/// Result JSON for the recover command: kept/removed point lists, final Betti
/// pair and, when requested, the addition/reduction trace.
inline std::string serialize_recovery(const RecoveryResult& res, bool with_trace) {
    nlohmann::json j;
    j["kept"] = detail::points_to_json(positions_of(res.kept));
    j["removed"] = detail::points_to_json(positions_of(res.removed));
    j["betti"] = {res.final_betti.beta0, res.final_betti.beta1};
    if (with_trace) {
        nlohmann::json trace;
        trace["budgets"] = res.budget_trace;
        nlohmann::json betti_arr = nlohmann::json::array();
        for (const auto& b : res.betti_trace) betti_arr.push_back({b.beta0, b.beta1});
        trace["betti"] = betti_arr;
        nlohmann::json steps = nlohmann::json::array();
        for (const auto& s : res.reduction_trace) {
            steps.push_back({{"vertex", s.vertex_id},
                             {"index", s.index},
                             {"removed", s.removed},
                             {"betti", {s.betti_after.beta0, s.betti_after.beta1}}});
        }
        trace["reduction"] = steps;
        trace["seed"] = res.seed;
        trace["reduction_ran"] = res.reduction_ran;
        j["trace"] = trace;
    }
    return j.dump(2) + "\n";
}

inline std::string serialize_points(const std::vector<Point2>& pts) {
    return detail::points_to_json(pts).dump() + "\n";
}

}  // namespace covrec
