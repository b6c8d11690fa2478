#include "mkin/session.hpp"

#include <filesystem>

#include "mkin/json_io.hpp"
#include "mkin/models.hpp"

namespace mkin {

namespace {

using json = nlohmann::json;

class UnknownMethod : public ContractError {
    using ContractError::ContractError;
};

// Error codes on the wire, one per library error class.
std::string error_code(const std::exception& e) {
    if (dynamic_cast<const UnknownMethod*>(&e)) return "unknown_method";
    if (dynamic_cast<const ParseError*>(&e)) return "parse_error";
    if (dynamic_cast<const ModelError*>(&e)) return "model_error";
    if (dynamic_cast<const TopologyError*>(&e)) return "topology_error";
    if (dynamic_cast<const SolveError*>(&e)) return "solve_error";
    if (dynamic_cast<const IoError*>(&e)) return "io_error";
    if (dynamic_cast<const GeometryError*>(&e)) return "geometry_error";
    return "invalid_params";
}

json error(const json& id, const std::string& code, const std::string& message) {
    return {{"id", id}, {"error", {{"code", code}, {"message", message}}}};
}

bool is_catalog(const std::string& name) {
    for (const auto& n : builtin_names())
        if (n == name) return true;
    for (const auto& n : fixture_names())
        if (n == name) return true;
    return false;
}

}  // namespace

std::string Session::handle_line(const std::string& line) {
    json req;
    try {
        req = json::parse(line);
    } catch (const json::parse_error& e) {
        return error(nullptr, "parse_error", e.what()).dump();
    }
    return handle(req).dump();
}

json Session::handle(const json& req) {
    const json id = req.is_object() && req.contains("id") ? req["id"] : json(nullptr);
    if (!req.is_object() || !req.contains("method") || !req["method"].is_string())
        return error(id, "invalid_request", "request needs a string 'method'");
    const json params = req.value("params", json::object());
    if (!params.is_object()) return error(id, "invalid_request", "'params' must be an object");
    try {
        return {{"id", id}, {"result", dispatch(req["method"].get<std::string>(), params)}};
    } catch (const Error& e) {
        return error(id, error_code(e), e.what());
    } catch (const json::exception& e) {
        return error(id, "invalid_params", e.what());
    }
}

json Session::dispatch(const std::string& method, const json& params) {
    if (method == "load_model") return load_model(params);
    if (method == "get_topology") {
        const Model& m = require();
        if (params.value("format", std::string("json")) == "dot") return {{"dot", topology_dot(m.robot, m.topo)}};
        return json::parse(topology_json(m.robot, m.topo));
    }
    if (method == "get_state") return state();
    if (method == "set_lengths") return set_lengths(params);
    if (method == "set_target") return set_target(params);
    if (method == "sample_workspace") return sample(params);
    if (method == "reset") {
        require();
        model_->cfg = rest_configuration(model_->robot);
        ++revision_;
        return state();
    }
    throw UnknownMethod("unknown method '" + method + "'");
}

const Session::Model& Session::require() const {
    if (!model_) throw ContractError("no model loaded");
    return *model_;
}

int Session::link_param(const json& params, const char* key) const {
    const Model& m = require();
    if (!params.contains(key)) {
        const int id = m.robot.link_id(default_end_effector(m.name));
        if (id < 0) throw ContractError(std::string("'") + key + "' is required for this model");
        return id;
    }
    const json& v = params[key];
    const int id = v.is_number_integer() ? v.get<int>() : m.robot.link_id(v.get<std::string>());
    if (id < 0 || id >= m.robot.n_links()) throw ContractError("unknown link " + v.dump());
    return id;
}

json Session::load_model(const json& params) {
    const double scale = params.value("scale", 1.0);
    RobotDescription d;
    if (params.contains("builtin")) {
        d = catalog_model(params["builtin"].get<std::string>(), {scale});
    } else if (params.contains("mrdf")) {
        const json& m = params["mrdf"];
        d = parse_mrdf(m.is_string() ? m.get<std::string>() : m.dump());
    } else if (params.contains("name")) {
        // a catalog name or a file path
        const std::string n = params["name"].get<std::string>();
        d = is_catalog(n) || !std::filesystem::exists(n) ? catalog_model(n, {scale}) : load_mrdf_file(n);
    } else {
        throw ContractError("load_model needs 'builtin', 'mrdf' or 'name'");
    }
    Model m{d.name, compile(d), {}, {}};
    m.topo = build_topology(m.robot);
    m.cfg = rest_configuration(m.robot);
    if (params.contains("builtin")) m.name = params["builtin"].get<std::string>();
    else if (params.contains("name") && is_catalog(params["name"].get<std::string>())) m.name = params["name"];
    model_ = std::move(m);
    ++revision_;
    json out = state();
    json acts = json::array();
    for (const auto& a : model_->robot.actuators)
        acts.push_back({{"id", a.id},
                        {"name", a.name},
                        {"lower", a.lower},
                        {"upper", a.upper},
                        {"group", model_->topo.of_actuator(a.id).actuator},
                        {"type", std::string(1, "ABCD"[static_cast<int>(model_->topo.of_actuator(a.id).type)])}});
    out["actuators"] = acts;
    json groups = json::array();
    for (const auto& it : model_->topo.iteps) groups.push_back(it.group);
    out["groups"] = groups;
    out["name"] = model_->name;
    return out;
}

json Session::state() const {
    const Model& m = require();
    json out = configuration_json(m.robot, m.cfg);
    out["revision"] = revision_;
    json visuals = json::object();
    for (const auto& l : m.robot.links) {
        json parts = json::array();
        for (const auto& v : l.visuals)
            parts.push_back({{"type", v.geometry.type}, {"dims", v.geometry.dims}, {"offset", pose_to_json(v.offset)}});
        visuals[l.name] = parts;
    }
    out["visuals"] = visuals;
    return out;
}

json Session::set_lengths(const json& params) {
    const Model& m = require();
    const json& map = params.at("lengths");
    if (!map.is_object()) throw ContractError("'lengths' must be an object of actuator name to length");
    std::vector<double> L = m.cfg.lengths;
    std::vector<std::optional<double>> given(m.robot.n_actuators());
    for (const auto& [name, value] : map.items()) {
        const int a = m.robot.actuator_id(name);
        if (a < 0) throw ContractError("unknown actuator '" + name + "'");
        given[a] = value.get<double>();
    }
    // a value given for any member moves the whole redundancy group
    for (const auto& it : m.topo.iteps) {
        std::optional<double> v;
        for (int g : it.group) {
            if (!given[g]) continue;
            if (v && *v != *given[g])
                throw ContractError("conflicting lengths for redundant actuators in the group of '" +
                                    m.robot.actuators[it.actuator].name + "'");
            v = given[g];
        }
        if (v)
            for (int g : it.group) L[g] = *v;
    }
    Configuration cfg = m.cfg;
    forward_kinematics(m.robot, m.topo, L, cfg);
    model_->cfg = std::move(cfg);
    ++revision_;
    return state();
}

json Session::set_target(const json& params) {
    const Model& m = require();
    IkProblem p;
    p.end_effector = link_param(params, "end_effector");
    p.target = pose_from_json(params.at("pose"));
    if (params.contains("solver")) {
        const auto s = parse_solver(params["solver"].get<std::string>());
        if (!s) throw ContractError("unknown solver " + params["solver"].dump());
        p.options.solver = *s;
    }
    p.options.tol = params.value("tol", p.options.tol);
    p.options.max_iterations = params.value("max_iterations", p.options.max_iterations);
    p.options.multistart = params.value("multistart", p.options.multistart);
    p.options.seed = params.value("seed", p.options.seed);
    IkResult r = solve_ik(m.robot, m.topo, m.cfg, p);
    model_->cfg = std::move(r.config);
    ++revision_;
    json out = state();
    out["ik"] = {{"psi", r.psi},
                 {"trace", r.trace},
                 {"converged", r.converged},
                 {"iterations", r.iterations},
                 {"evaluations", r.evaluations},
                 {"end_effector", m.robot.links[p.end_effector].name}};
    return out;
}

json Session::sample(const json& params) const {
    const Model& m = require();
    WorkspaceSpec spec;
    spec.end_effector = link_param(params, "end_effector");
    if (params.contains("samples")) {
        const json& s = params["samples"];
        spec.samples = s.is_array() ? s.get<std::vector<int>>() : std::vector<int>{s.get<int>()};
    }
    spec.cap = params.value("cap", spec.cap);
    const auto out = sample_workspace(m.robot, m.topo, m.cfg, spec);
    json pts = json::array();
    for (const auto& s : out)
        pts.push_back({{"lengths", s.lengths}, {"feasible", s.feasible},
                       {"pose", s.feasible ? pose_to_json(s.pose) : json(nullptr)}});
    return {{"samples", pts}, {"revision", revision_}};
}

}  // namespace mkin
