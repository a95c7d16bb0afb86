#include "tfe/config.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "json_io.hpp"

namespace tfe {

namespace {

using Json = nlohmann::json;
using OJson = nlohmann::ordered_json;

/// 1-based line and column of a byte offset.
std::pair<int, int> locate(const std::string& text, std::size_t offset) {
    int line = 1, col = 1;
    for (std::size_t i = 0; i < offset && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return {line, col};
}

/// Location of the first occurrence of "key" in the source, or of the document start.
std::pair<int, int> key_location(const std::string& text, const std::string& key) {
    const auto pos = text.find('"' + key + '"');
    return locate(text, pos == std::string::npos ? 0 : pos);
}

thread_local const std::string* g_source = nullptr;

[[noreturn]] void parse_fail(const std::string& key, const std::string& message) {
    const auto [line, col] = g_source ? key_location(*g_source, key) : std::pair<int, int>{1, 1};
    throw ConfigParseError(line, col, message);
}

void check_keys(const Json& j, const std::string& where, std::initializer_list<const char*> allowed) {
    if (!j.is_object()) parse_fail(where, "'" + where + "' must be an object");
    const std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [k, v] : j.items()) {
        if (!ok.contains(k)) parse_fail(k, "unknown key '" + k + "' in " + where);
    }
}

double get_number(const Json& j, const std::string& key) {
    const auto& v = j.at(key);
    if (!v.is_number()) parse_fail(key, "'" + key + "' must be a number");
    return v.get<double>();
}

std::size_t get_count(const Json& j, const std::string& key) {
    const auto& v = j.at(key);
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0)) {
        parse_fail(key, "'" + key + "' must be a non-negative integer");
    }
    return v.get<std::size_t>();
}

bool get_bool(const Json& j, const std::string& key) {
    const auto& v = j.at(key);
    if (!v.is_boolean()) parse_fail(key, "'" + key + "' must be true or false");
    return v.get<bool>();
}

std::string get_string(const Json& j, const std::string& key) {
    const auto& v = j.at(key);
    if (!v.is_string()) parse_fail(key, "'" + key + "' must be a string");
    return v.get<std::string>();
}

std::vector<double> get_numbers(const Json& j, const std::string& key) {
    const auto& v = j.at(key);
    if (!v.is_array()) parse_fail(key, "'" + key + "' must be an array of numbers");
    std::vector<double> out;
    for (const auto& e : v) {
        if (!e.is_number()) parse_fail(key, "'" + key + "' must be an array of numbers");
        out.push_back(e.get<double>());
    }
    return out;
}

std::vector<std::string> get_strings(const Json& j, const std::string& key) {
    const auto& v = j.at(key);
    if (!v.is_array()) parse_fail(key, "'" + key + "' must be an array of strings");
    std::vector<std::string> out;
    for (const auto& e : v) {
        if (!e.is_string()) parse_fail(key, "'" + key + "' must be an array of strings");
        out.push_back(e.get<std::string>());
    }
    return out;
}

const std::pair<const char*, Command> kCommands[] = {{"selfsimilar", Command::SelfSimilar},
                                                     {"asymptotics", Command::Asymptotics},
                                                     {"transient", Command::Transient},
                                                     {"figure", Command::Figure},
                                                     {"sweep", Command::Sweep}};

/// Short override keys and the document paths they address.
const std::pair<const char*, const char*> kAliases[] = {
    {"n", "params.n"},
    {"alpha", "params.alpha"},
    {"D", "params.D"},
    {"d", "params.d"},
    {"mass", "params.mass"},
    {"tau", "step.tau"},
    {"mesh_nodes", "step.mesh_nodes"},
    {"theta_clamp", "step.theta_clamp"},
    {"rescale_period", "step.rescale_period"},
    {"tau_rel", "step.tau_rel"},
    {"tau_max", "step.tau_max"},
    {"mesh_grading", "step.mesh_grading"},
    {"reject_energy_increase", "step.reject_energy_increase"},
    {"workers", "sweep.workers"},
};

void apply_override(Json& doc, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0) {
        throw ConfigParseError(1, 1, "override '" + assignment + "' is not key=value");
    }
    std::string key = assignment.substr(0, eq);
    const std::string raw = assignment.substr(eq + 1);
    for (const auto& [alias, path] : kAliases) {
        if (key == alias) key = path;
    }
    Json value = Json::parse(raw, nullptr, false);
    if (value.is_discarded()) value = raw;
    Json* node = &doc;
    std::size_t start = 0;
    while (true) {
        const auto dot = key.find('.', start);
        const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
        if (part.empty()) throw ConfigParseError(1, 1, "override key '" + key + "' is malformed");
        if (dot == std::string::npos) {
            if (part == "D") node->erase("d");
            if (part == "d") node->erase("D");
            (*node)[part] = value;
            break;
        }
        if (!node->contains(part)) (*node)[part] = Json::object();
        node = &(*node)[part];
        if (!node->is_object()) throw ConfigParseError(1, 1, "override key '" + key + "' does not name a field");
        start = dot + 1;
    }
}

RunConfig from_json(const Json& doc) {
    check_keys(doc, "document",
               {"command", "params", "step", "initial_datum", "t_end", "output_times", "output_dir", "figures",
                "figure_t_end", "grid_cells", "sweep", "overrides"});
    if (!doc.contains("command")) parse_fail("command", "missing required key 'command'");
    RunConfig c;
    const std::string cmd = get_string(doc, "command");
    bool found = false;
    for (const auto& [name, value] : kCommands) {
        if (cmd == name) {
            c.command = value;
            found = true;
        }
    }
    if (!found) parse_fail("command", "unknown command '" + cmd + "' (selfsimilar|asymptotics|transient|figure|sweep)");

    if (doc.contains("params")) {
        c.params = detail::params_from_json(doc.at("params"));
    } else if (c.command != Command::Figure) {
        parse_fail("command", "missing required key 'params'");
    }
    if (doc.contains("step")) c.step = detail::step_from_json(doc.at("step"), c.step);
    if (doc.contains("initial_datum")) {
        const auto& d = doc.at("initial_datum");
        if (d.is_string()) {
            const auto name = d.get<std::string>();
            if (name == "fig1_bump") c.initial_datum.preset = InitialDatum::Fig1Bump;
            else if (name == "corner") c.initial_datum.preset = InitialDatum::Corner;
            else parse_fail("initial_datum", "unknown initial datum '" + name + "' (fig1_bump|corner|{\"file\": path})");
        } else if (d.is_object()) {
            check_keys(d, "initial_datum", {"file"});
            if (!d.contains("file")) parse_fail("initial_datum", "initial_datum object needs 'file'");
            c.initial_datum.file = get_string(d, "file");
        } else {
            parse_fail("initial_datum", "'initial_datum' must be a preset name or {\"file\": path}");
        }
    }
    if (doc.contains("t_end")) c.t_end = get_number(doc, "t_end");
    if (doc.contains("output_times")) c.output_times = get_numbers(doc, "output_times");
    if (doc.contains("output_dir")) c.output_dir = get_string(doc, "output_dir");
    if (doc.contains("figures")) c.figures = get_strings(doc, "figures");
    if (doc.contains("figure_t_end")) c.figure_t_end = get_number(doc, "figure_t_end");
    if (doc.contains("grid_cells")) c.grid_cells = get_count(doc, "grid_cells");
    if (doc.contains("sweep")) {
        const auto& s = doc.at("sweep");
        check_keys(s, "sweep", {"n", "alpha", "workers"});
        if (s.contains("n")) c.sweep.n = get_numbers(s, "n");
        if (s.contains("alpha")) c.sweep.alpha = get_numbers(s, "alpha");
        if (s.contains("workers")) c.sweep.workers = get_count(s, "workers");
    }
    if (doc.contains("overrides")) c.overrides = get_strings(doc, "overrides");
    return c;
}

}  // namespace

namespace detail {

OJson params_to_json(const ProblemParams& p) {
    OJson j;
    j["n"] = p.n;
    j["alpha"] = p.alpha;
    if (const auto* f = std::get_if<PhysicalFriction>(&p.friction)) j["d"] = f->d;
    else j["D"] = std::get<NormalizedFriction>(p.friction).D;
    j["mass"] = p.mass;
    return j;
}

OJson step_to_json(const StepConfig& c) {
    OJson j;
    j["tau"] = c.tau;
    j["mesh_nodes"] = c.mesh_nodes;
    j["theta_clamp"] = c.theta_clamp;
    j["rescale_period"] = c.rescale_period ? OJson(*c.rescale_period) : OJson(nullptr);
    j["tau_rel"] = c.tau_rel;
    j["tau_max"] = std::isinf(c.tau_max) ? OJson(nullptr) : OJson(c.tau_max);
    j["mesh_grading"] = c.mesh_grading;
    j["reject_energy_increase"] = c.reject_energy_increase;
    return j;
}

ProblemParams params_from_json(const Json& j) {
    check_keys(j, "params", {"n", "alpha", "D", "d", "mass"});
    ProblemParams p;
    if (!j.contains("n")) parse_fail("params", "params needs 'n'");
    p.n = get_number(j, "n");
    p.alpha = j.contains("alpha") ? get_number(j, "alpha") : critical_alpha(p.n);
    if (j.contains("D") && j.contains("d")) parse_fail("d", "give either D (normalized) or d (physical), not both");
    if (j.contains("d")) p.friction = PhysicalFriction{get_number(j, "d")};
    else p.friction = NormalizedFriction{j.contains("D") ? get_number(j, "D") : 1.0};
    if (j.contains("mass")) p.mass = get_number(j, "mass");
    return p;
}

StepConfig step_from_json(const Json& j, StepConfig base) {
    check_keys(j, "step",
               {"tau", "mesh_nodes", "theta_clamp", "rescale_period", "tau_rel", "tau_max", "mesh_grading",
                "reject_energy_increase"});
    StepConfig c = base;
    if (j.contains("tau")) c.tau = get_number(j, "tau");
    if (j.contains("mesh_nodes")) c.mesh_nodes = get_count(j, "mesh_nodes");
    if (j.contains("theta_clamp")) c.theta_clamp = get_number(j, "theta_clamp");
    if (j.contains("rescale_period")) {
        if (j.at("rescale_period").is_null()) c.rescale_period.reset();
        else c.rescale_period = get_count(j, "rescale_period");
    }
    if (j.contains("tau_rel")) c.tau_rel = get_number(j, "tau_rel");
    if (j.contains("tau_max")) {
        c.tau_max = j.at("tau_max").is_null() ? std::numeric_limits<double>::infinity() : get_number(j, "tau_max");
    }
    if (j.contains("mesh_grading")) c.mesh_grading = get_number(j, "mesh_grading");
    if (j.contains("reject_energy_increase")) c.reject_energy_increase = get_bool(j, "reject_energy_increase");
    return c;
}

}  // namespace detail

const char* to_string(Command c) noexcept {
    for (const auto& [name, value] : kCommands) {
        if (value == c) return name;
    }
    return "unknown";
}

void validate(const RunConfig& c) {
    auto reject = [](const std::string& what) { fail(ErrorKind::ValidationError, what); };
    if (c.command != Command::Figure) c.params.validate();
    switch (c.command) {
        case Command::SelfSimilar:
            if (!c.params.is_normalized()) reject("selfsimilar needs normalized friction D");
            if (c.params.regime() != Regime::Balanced) {
                reject("selfsimilar needs alpha = 4/(n+3); use the asymptotics command for other alpha");
            }
            break;
        case Command::Asymptotics:
            if (c.params.regime() == Regime::Balanced) {
                reject("alpha = 4/(n+3) is the balanced case; use the selfsimilar command");
            }
            break;
        case Command::Transient:
        case Command::Sweep:
            c.step.validate();
            if (!(std::isfinite(c.t_end) && c.t_end > 0.0)) reject("t_end must be > 0");
            for (std::size_t i = 0; i < c.output_times.size(); ++i) {
                const double t = c.output_times[i];
                if (!(t > 0.0 && t <= c.t_end)) reject("output_times must lie in (0, t_end]");
                if (i > 0 && !(t > c.output_times[i - 1])) reject("output_times must be increasing");
            }
            if (c.command == Command::Sweep && (c.sweep.n.empty() || c.sweep.alpha.empty())) {
                reject("sweep needs non-empty n and alpha lists");
            }
            for (double n : c.sweep.n) {
                if (!(n >= 1.0 && n < 3.0)) reject("sweep n out of [1,3)");
            }
            for (double a : c.sweep.alpha) {
                if (!(a > 0.0)) reject("sweep alpha must be > 0");
            }
            break;
        case Command::Figure: {
            static const std::set<std::string> tags{"fig1", "fig3", "fig5", "fig6", "fig7", "fig8", "fig9"};
            for (const auto& f : c.figures) {
                if (!tags.contains(f)) reject("unknown figure tag '" + f + "'");
            }
            if (!(c.figure_t_end > 1.0)) reject("figure_t_end must be > 1");
            c.step.validate();
            break;
        }
    }
    if (c.output_dir.empty()) reject("output_dir must not be empty");
    if (c.grid_cells < 8) reject("grid_cells must be >= 8");
}

RunConfig parse_config(const std::string& text, const std::vector<std::string>& overrides) {
    Json doc;
    try {
        doc = Json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        const auto [line, col] = locate(text, e.byte > 0 ? e.byte - 1 : 0);
        std::string msg = e.what();
        const auto p = msg.find("parse error");
        throw ConfigParseError(line, col, p == std::string::npos ? msg : msg.substr(p));
    }
    if (!doc.is_object()) throw ConfigParseError(1, 1, "config must be a JSON object");
    for (const auto& o : overrides) apply_override(doc, o);
    g_source = &text;
    RunConfig c;
    try {
        c = from_json(doc);
    } catch (...) {
        g_source = nullptr;
        throw;
    }
    g_source = nullptr;
    c.overrides.insert(c.overrides.end(), overrides.begin(), overrides.end());
    validate(c);
    return c;
}

std::string serialize_config(const RunConfig& c) {
    OJson j;
    j["command"] = to_string(c.command);
    j["params"] = detail::params_to_json(c.params);
    j["step"] = detail::step_to_json(c.step);
    if (c.initial_datum.file) j["initial_datum"] = {{"file", *c.initial_datum.file}};
    else j["initial_datum"] = c.initial_datum.preset == InitialDatum::Corner ? "corner" : "fig1_bump";
    j["t_end"] = c.t_end;
    j["output_times"] = c.output_times;
    j["output_dir"] = c.output_dir;
    j["figures"] = c.figures;
    j["figure_t_end"] = c.figure_t_end;
    j["grid_cells"] = c.grid_cells;
    j["sweep"] = {{"n", c.sweep.n}, {"alpha", c.sweep.alpha}, {"workers", c.sweep.workers}};
    j["overrides"] = c.overrides;
    return j.dump(2) + "\n";
}

}  // namespace tfe
