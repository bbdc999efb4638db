#include "puma/config.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace puma {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& what) { throw ConfigError(path + ": " + what); }

void reject_unknown(const json& object, const std::string& path, std::initializer_list<const char*> allowed) {
    const std::set<std::string> keys(allowed.begin(), allowed.end());
    for (const auto& [key, value] : object.items()) {
        if (!keys.contains(key)) fail(path.empty() ? key : path + "." + key, "unknown key");
    }
}

const json& require_object(const json& node, const std::string& path) {
    if (!node.is_object()) fail(path, "expected an object");
    return node;
}

double number_at(const json& node, const std::string& path) {
    if (!node.is_number()) fail(path, "expected a number");
    const double v = node.get<double>();
    if (!std::isfinite(v)) fail(path, "must be finite");
    return v;
}

double positive_at(const json& node, const std::string& path) {
    const double v = number_at(node, path);
    if (!(v > 0.0)) fail(path, "must be > 0");
    return v;
}

double non_negative_at(const json& node, const std::string& path) {
    const double v = number_at(node, path);
    if (v < 0.0) fail(path, "must be >= 0");
    return v;
}

const json& member(const json& object, const char* key, const std::string& path) {
    if (!object.contains(key)) fail(path + "." + key, "missing required key");
    return object.at(key);
}

State history_at(const json& node, const std::string& path) {
    require_object(node, path);
    reject_unknown(node, path, {"x", "y"});
    return {non_negative_at(member(node, "x", path), path + ".x"),
            non_negative_at(member(node, "y", path), path + ".y")};
}

std::vector<double> positive_list(const json& node, const std::string& path) {
    if (!node.is_array()) fail(path, "expected an array of numbers");
    if (node.empty()) fail(path, "must not be empty");
    std::vector<double> out;
    for (std::size_t i = 0; i < node.size(); ++i) out.push_back(positive_at(node[i], path + "[" + std::to_string(i) + "]"));
    return out;
}

bool bool_at(const json& node, const std::string& path) {
    if (!node.is_boolean()) fail(path, "expected true or false");
    return node.get<bool>();
}

ModelParams parse_model(const json& node) {
    require_object(node, "model");
    reject_unknown(node, "model", {"r", "K", "a", "gamma", "beta", "N", "tau"});
    ModelParams p;
    p.r = positive_at(member(node, "r", "model"), "model.r");
    p.K = positive_at(member(node, "K", "model"), "model.K");
    p.a = positive_at(member(node, "a", "model"), "model.a");
    p.gamma = positive_at(member(node, "gamma", "model"), "model.gamma");
    p.beta = positive_at(member(node, "beta", "model"), "model.beta");
    p.N = positive_at(member(node, "N", "model"), "model.N");
    p.tau = non_negative_at(member(node, "tau", "model"), "model.tau");
    return p;
}

SimulationConfig parse_simulation(const json& node) {
    require_object(node, "simulation");
    reject_unknown(node, "simulation", {"history", "t_end", "step"});
    SimulationConfig s;
    if (node.contains("history")) s.history = history_at(node["history"], "simulation.history");
    if (node.contains("t_end")) s.t_end = positive_at(node["t_end"], "simulation.t_end");
    if (node.contains("step")) s.step = positive_at(node["step"], "simulation.step");
    return s;
}

StabilityConfig parse_stability(const json& node) {
    require_object(node, "stability");
    reject_unknown(node, "stability", {"tau_ref", "j_max"});
    StabilityConfig s;
    if (node.contains("tau_ref")) s.tau_ref = non_negative_at(node["tau_ref"], "stability.tau_ref");
    if (node.contains("j_max")) {
        const json& j = node["j_max"];
        if (!j.is_number_integer()) fail("stability.j_max", "expected an integer");
        const auto v = j.get<long long>();
        if (v < 1 || v > 1000000) fail("stability.j_max", "must lie in [1, 1000000]");
        s.j_max = static_cast<int>(v);
    }
    return s;
}

ScenarioConfig parse_scenario(const json& node) {
    require_object(node, "scenario");
    reject_unknown(node, "scenario", {"rules"});
    ScenarioConfig s;
    if (!node.contains("rules")) return s;
    const json& rules = node["rules"];
    if (!rules.is_array()) fail("scenario.rules", "expected an array");
    for (std::size_t i = 0; i < rules.size(); ++i) {
        const std::string path = "scenario.rules[" + std::to_string(i) + "]";
        require_object(rules[i], path);
        reject_unknown(rules[i], path, {"target", "threshold", "fraction"});
        EventRule rule;
        const json& target = member(rules[i], "target", path);
        if (!target.is_string()) fail(path + ".target", "expected \"prey\" or \"predator\"");
        try {
            rule.target = target_from_string(target.get<std::string>());
        } catch (const std::invalid_argument&) {
            fail(path + ".target", "expected \"prey\" or \"predator\"");
        }
        rule.threshold = positive_at(member(rules[i], "threshold", path), path + ".threshold");
        rule.fraction_removed = number_at(member(rules[i], "fraction", path), path + ".fraction");
        if (!(rule.fraction_removed > 0.0 && rule.fraction_removed < 1.0)) fail(path + ".fraction", "must lie in (0, 1)");
        s.rules.push_back(rule);
    }
    return s;
}

GridSpec parse_grid(const json& node, const ModelParams& model) {
    require_object(node, "grid");
    reject_unknown(node, "grid",
                   {"r", "K", "a", "gamma", "beta", "N", "tau", "t_end", "step", "history", "eps_extinct", "osc_rel",
                    "threads"});
    GridSpec g;
    g.r = positive_list(member(node, "r", "grid"), "grid.r");
    g.K = positive_list(member(node, "K", "grid"), "grid.K");
    g.a = positive_list(member(node, "a", "grid"), "grid.a");
    g.gamma = positive_list(member(node, "gamma", "grid"), "grid.gamma");
    g.beta = positive_list(member(node, "beta", "grid"), "grid.beta");
    g.N = positive_list(member(node, "N", "grid"), "grid.N");
    g.tau = node.contains("tau") ? non_negative_at(node["tau"], "grid.tau") : model.tau;
    if (node.contains("t_end")) g.t_end = positive_at(node["t_end"], "grid.t_end");
    if (node.contains("step")) g.step = positive_at(node["step"], "grid.step");
    if (node.contains("history")) g.history = history_at(node["history"], "grid.history");
    if (node.contains("eps_extinct")) g.classifier.eps_extinct = positive_at(node["eps_extinct"], "grid.eps_extinct");
    if (node.contains("osc_rel")) g.classifier.osc_rel = positive_at(node["osc_rel"], "grid.osc_rel");
    if (node.contains("threads")) {
        const json& t = node["threads"];
        if (!t.is_number_integer() || t.get<long long>() < 0) fail("grid.threads", "expected a non-negative integer");
        g.threads = static_cast<unsigned>(t.get<long long>());
    }
    return g;
}

OutputConfig parse_output(const json& node) {
    require_object(node, "output");
    reject_unknown(node, "output", {"dir", "svg", "log_prey"});
    OutputConfig o;
    if (node.contains("dir")) {
        if (!node["dir"].is_string()) fail("output.dir", "expected a string");
        o.dir = node["dir"].get<std::string>();
    }
    if (node.contains("svg")) o.svg = bool_at(node["svg"], "output.svg");
    if (node.contains("log_prey")) o.log_prey = bool_at(node["log_prey"], "output.log_prey");
    return o;
}

json history_json(const State& s) { return json{{"x", s.x}, {"y", s.y}}; }

}  // namespace

RunConfig parse_config(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("malformed configuration: ") + e.what());
    }
    if (!doc.is_object()) throw ConfigError("configuration must be a JSON object");
    reject_unknown(doc, "", {"model", "simulation", "stability", "scenario", "grid", "output"});
    if (!doc.contains("model")) fail("model", "missing required section");

    RunConfig cfg;
    cfg.model = parse_model(doc["model"]);
    if (doc.contains("simulation")) cfg.simulation = parse_simulation(doc["simulation"]);
    if (doc.contains("stability")) cfg.stability = parse_stability(doc["stability"]);
    if (doc.contains("scenario")) cfg.scenario = parse_scenario(doc["scenario"]);
    if (doc.contains("grid")) cfg.grid = parse_grid(doc["grid"], cfg.model);
    if (doc.contains("output")) cfg.output = parse_output(doc["output"]);
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open configuration file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::string serialize_config(const RunConfig& cfg) {
    json doc;
    const ModelParams& m = cfg.model;
    doc["model"] = {{"r", m.r}, {"K", m.K}, {"a", m.a}, {"gamma", m.gamma}, {"beta", m.beta}, {"N", m.N}, {"tau", m.tau}};

    json sim = {{"t_end", cfg.simulation.t_end}};
    if (cfg.simulation.history) sim["history"] = history_json(*cfg.simulation.history);
    if (cfg.simulation.step) sim["step"] = *cfg.simulation.step;
    doc["simulation"] = sim;

    json stab = {{"j_max", cfg.stability.j_max}};
    if (cfg.stability.tau_ref) stab["tau_ref"] = *cfg.stability.tau_ref;
    doc["stability"] = stab;

    json rules = json::array();
    for (const EventRule& r : cfg.scenario.rules) {
        rules.push_back({{"target", to_string(r.target)}, {"threshold", r.threshold}, {"fraction", r.fraction_removed}});
    }
    doc["scenario"] = {{"rules", rules}};

    if (cfg.grid) {
        const GridSpec& g = *cfg.grid;
        json grid = {{"r", g.r},         {"K", g.K},
                     {"a", g.a},         {"gamma", g.gamma},
                     {"beta", g.beta},   {"N", g.N},
                     {"tau", g.tau},     {"t_end", g.t_end},
                     {"eps_extinct", g.classifier.eps_extinct},
                     {"osc_rel", g.classifier.osc_rel},
                     {"threads", g.threads}};
        if (g.step > 0.0) grid["step"] = g.step;
        if (g.history) grid["history"] = history_json(*g.history);
        doc["grid"] = grid;
    }
    doc["output"] = {{"dir", cfg.output.dir}, {"svg", cfg.output.svg}, {"log_prey", cfg.output.log_prey}};
    return doc.dump(2);
}

}  // namespace puma
