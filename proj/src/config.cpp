#include "kinchain/config.hpp"

#include <nlohmann/json.hpp>

#include <fstream>
#include <set>

namespace kinchain {

using nlohmann::json;

namespace {

void reject_unknown(const json& obj, const std::set<std::string>& allowed,
                    const std::string& where) {
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (!allowed.count(it.key()))
            throw ConfigError("unknown key \"" + (where.empty() ? it.key() : where + "." + it.key()) +
                              "\"");
}

double require_number(const json& obj, const std::string& key, const std::string& where) {
    if (!obj.contains(key)) throw ConfigError("missing key \"" + where + key + "\"");
    if (!obj.at(key).is_number()) throw ConfigError("\"" + where + key + "\" must be a number");
    return obj.at(key).get<double>();
}

StateSpec parse_state(const json& j) {
    if (!j.is_object()) throw ConfigError("\"state\" must be an object");
    reject_unknown(j, {"kind", "n", "sigma_x", "sigma_v", "center_x", "center_v", "path"},
                   "state");
    StateSpec s;
    std::string kind = j.value("kind", "wigner");
    if (kind == "wigner") {
        s.kind = StateSpec::Kind::wigner;
        s.n = j.value("n", 0);
        if (s.n < 0) throw ConfigError("\"state.n\" must be >= 0");
    } else if (kind == "gaussian") {
        s.kind = StateSpec::Kind::gaussian;
        s.sigma_x = require_number(j, "sigma_x", "state.");
        s.sigma_v = require_number(j, "sigma_v", "state.");
        s.center_x = j.value("center_x", 0.0);
        s.center_v = j.value("center_v", 0.0);
        if (!(s.sigma_x > 0.0) || !(s.sigma_v > 0.0))
            throw ConfigError("\"state.sigma_x\"/\"state.sigma_v\" must be positive");
    } else if (kind == "file") {
        s.kind = StateSpec::Kind::file;
        if (!j.contains("path")) throw ConfigError("missing key \"state.path\"");
        s.path = j.at("path").get<std::string>();
    } else {
        throw ConfigError("\"state.kind\" must be one of wigner|gaussian|file");
    }
    return s;
}

ClosureSpec parse_closure(const json& j) {
    if (!j.is_object()) throw ConfigError("\"closure\" must be an object");
    reject_unknown(j, {"kind", "k_max", "potential"}, "closure");
    ClosureSpec c;
    std::string kind = j.value("kind", "moyal");
    if (kind == "moyal")
        c.kind = ClosureSpec::Kind::moyal;
    else if (kind == "zero")
        c.kind = ClosureSpec::Kind::zero;
    else
        throw ConfigError("\"closure.kind\" must be one of moyal|zero");
    c.k_max = j.value("k_max", 3);
    if (c.k_max < 0) throw ConfigError("\"closure.k_max\" must be >= 0");
    if (j.contains("potential")) {
        if (!j.at("potential").is_array())
            throw ConfigError("\"closure.potential\" must be a coefficient array");
        for (const json& v : j.at("potential")) c.potential.push_back(v.get<double>());
    }
    return c;
}

} // namespace

RunConfig parse_config(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config syntax error: ") + e.what());
    }
    if (!doc.is_object()) throw ConfigError("config root must be an object");
    reject_unknown(doc,
                   {"scenario", "state", "params", "grid", "closure", "dt", "steps",
                    "snapshot_stride", "checks", "output", "tolerances"},
                   "");

    RunConfig cfg;
    std::string scenario = doc.value("scenario", "evolve");
    if (scenario == "state")
        cfg.scenario = Scenario::state;
    else if (scenario == "evolve")
        cfg.scenario = Scenario::evolve;
    else if (scenario == "check")
        cfg.scenario = Scenario::check;
    else if (scenario == "report")
        cfg.scenario = Scenario::report;
    else
        throw ConfigError("\"scenario\" must be one of state|evolve|check|report");

    if (doc.contains("state")) cfg.state = parse_state(doc.at("state"));

    if (doc.contains("params")) {
        const json& jp = doc.at("params");
        if (!jp.is_object()) throw ConfigError("\"params\" must be an object");
        reject_unknown(jp, {"mass", "hbar", "omega"}, "params");
        cfg.params.mass = jp.value("mass", 1.0);
        cfg.params.hbar = jp.value("hbar", 1.0);
        cfg.params.omega = jp.value("omega", 1.0);
    }
    cfg.params.validate();

    if (doc.contains("grid")) {
        const json& jg = doc.at("grid");
        if (!jg.is_object()) throw ConfigError("\"grid\" must be an object");
        reject_unknown(jg, {"points", "widths", "axes"}, "grid");
        if (jg.contains("axes")) {
            for (const json& ja : jg.at("axes")) {
                reject_unknown(ja, {"order", "min", "max", "points", "components"}, "grid.axes[]");
                AxisSpec spec;
                spec.order = ja.at("order").get<int>();
                spec.lo = require_number(ja, "min", "grid.axes[].");
                spec.hi = require_number(ja, "max", "grid.axes[].");
                spec.points = ja.at("points").get<int>();
                spec.components = ja.value("components", 1);
                cfg.axes.push_back(spec);
            }
        } else {
            cfg.grid_points = jg.value("points", 0);
            cfg.grid_widths = jg.value("widths", 8.0);
            if (cfg.grid_points < 2) throw ConfigError("\"grid.points\" must be >= 2");
            if (!(cfg.grid_widths > 0.0)) throw ConfigError("\"grid.widths\" must be positive");
        }
    } else if (cfg.state.kind != StateSpec::Kind::file) {
        throw ConfigError("missing key \"grid\"");
    }

    if (doc.contains("closure")) cfg.closure = parse_closure(doc.at("closure"));

    if (cfg.scenario != Scenario::state) {
        cfg.dt = require_number(doc, "dt", "");
        if (!(cfg.dt > 0.0)) throw ConfigError("\"dt\" must be positive");
        cfg.steps = doc.value("steps", 1);
        if (cfg.steps < 1) throw ConfigError("\"steps\" must be >= 1");
    }
    cfg.snapshot_stride = doc.value("snapshot_stride", 1);
    if (cfg.snapshot_stride < 1) throw ConfigError("\"snapshot_stride\" must be >= 1");

    if (doc.contains("checks")) {
        if (!doc.at("checks").is_array()) throw ConfigError("\"checks\" must be an array");
        for (const json& jc : doc.at("checks")) {
            std::string name = jc.get<std::string>();
            auto id = equation_from_string(name);
            if (!id) throw ConfigError("unknown equation id \"" + name + "\" in \"checks\"");
            cfg.checks.push_back(*id);
        }
    }
    if (cfg.scenario == Scenario::check && cfg.checks.empty())
        throw ConfigError("scenario \"check\" needs a non-empty \"checks\" list");

    cfg.out_dir = doc.value("output", std::string("out"));
    if (doc.contains("tolerances")) {
        const json& jt = doc.at("tolerances");
        if (!jt.is_object()) throw ConfigError("\"tolerances\" must be an object");
        for (auto it = jt.begin(); it != jt.end(); ++it)
            cfg.tolerances[it.key()] = it.value().get<double>();
    }
    return cfg;
}

RunConfig parse_config_file(const std::filesystem::path& path,
                            std::span<const std::string> overrides) {
    std::ifstream is(path);
    if (!is) throw IoError("cannot open config: " + path.string());
    std::string text((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());

    if (!overrides.empty()) {
        json doc;
        try {
            doc = json::parse(text);
        } catch (const json::parse_error& e) {
            throw ConfigError(std::string("config syntax error: ") + e.what());
        }
        for (const std::string& ov : overrides) {
            std::size_t eq = ov.find('=');
            if (eq == std::string::npos)
                throw ConfigError("override must look like KEY=VALUE, got \"" + ov + "\"");
            std::string key = ov.substr(0, eq);
            std::string value = ov.substr(eq + 1);
            std::string pointer = "/";
            for (char c : key) pointer += (c == '.') ? '/' : c;
            json jv;
            try {
                jv = json::parse(value);
            } catch (const json::parse_error&) {
                jv = value; // plain string
            }
            doc[json::json_pointer(pointer)] = jv;
        }
        text = doc.dump();
    }
    return parse_config(text);
}

} // namespace kinchain
