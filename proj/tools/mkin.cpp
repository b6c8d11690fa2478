// mkin: command-line front end and session server.
#include <CLI11.hpp>

#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <sstream>

#include "mkin/bench.hpp"
#include "mkin/json_io.hpp"
#include "mkin/models.hpp"
#include "mkin/session.hpp"

// after Eigen: resolv.h defines a _res macro that collides with Eigen parameter names
#include <httplib.h>

using namespace mkin;
using json = nlohmann::json;

namespace {

// exit codes
constexpr int kOk = 0, kDomain = 1, kUsage = 2;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

bool is_catalog(const std::string& name) {
    for (const auto& n : builtin_names())
        if (n == name) return true;
    for (const auto& n : fixture_names())
        if (n == name) return true;
    return false;
}

struct Loaded {
    std::string name;
    Robot robot;
    Topology topo;
};

/// A file path, or a catalog name when no such file exists.
RobotDescription read_model(const std::string& arg, double scale, const ParseOptions& opts = {}) {
    if (std::filesystem::exists(arg)) return load_mrdf_file(arg, opts);
    if (is_catalog(arg)) return catalog_model(arg, {scale});
    throw IoError("no such file or built-in model: " + arg);
}

Loaded load(const std::string& arg, double scale) {
    RobotDescription d = read_model(arg, scale);
    Loaded m{is_catalog(arg) && !std::filesystem::exists(arg) ? arg : d.name, compile(d), {}};
    m.topo = build_topology(m.robot);
    return m;
}

/// Inline JSON, or the contents of a file.
json read_json_arg(const std::string& arg) {
    std::string text = arg;
    if (!arg.empty() && arg[0] != '{' && arg[0] != '[') {
        std::ifstream in(arg);
        if (!in) throw IoError("cannot read " + arg);
        std::stringstream ss;
        ss << in.rdbuf();
        text = ss.str();
    }
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("bad JSON argument: ") + e.what());
    }
}

/// "name=v,name=v", a JSON object, or a file holding one.
std::map<std::string, double> parse_lengths(const std::string& arg) {
    std::map<std::string, double> out;
    if (!arg.empty() && arg[0] != '{' && arg.find('=') != std::string::npos) {
        std::stringstream ss(arg);
        std::string item;
        while (std::getline(ss, item, ',')) {
            const auto eq = item.find('=');
            if (eq == std::string::npos) throw UsageError("expected name=value, got '" + item + "'");
            try {
                out[item.substr(0, eq)] = std::stod(item.substr(eq + 1));
            } catch (const std::exception&) {
                throw UsageError("bad number in '" + item + "'");
            }
        }
        return out;
    }
    const json j = read_json_arg(arg);
    if (!j.is_object()) throw UsageError("lengths must be a JSON object of actuator name to length");
    for (const auto& [k, v] : j.items()) out[k] = v.get<double>();
    return out;
}

int end_effector(const Loaded& m, const std::string& name) {
    if (name.empty()) {
        const int id = m.robot.link_id(default_end_effector(m.name));
        if (id < 0) throw ContractError("--ee is required for this model");
        return id;
    }
    const int id = m.robot.link_id(name);
    if (id < 0) throw ContractError("unknown end-effector link '" + name + "'");
    return id;
}

std::ostream& output(const std::string& path, std::ofstream& file) {
    if (path == "-") return std::cout;
    file.open(path);
    if (!file) throw IoError("cannot write " + path);
    return file;
}

double max_closure(const Robot& R, const Topology& topo, const Configuration& c) {
    double r = 0.0;
    for (const auto& fb : topo.graph.four_bars) r = std::max(r, closure_residual(R, c, fb));
    return r;
}

// ---- commands ----

int cmd_validate(const std::string& path) {
    // bounds are reported as findings rather than rejected by the parser
    const auto report = validate(compile(read_model(path, 1.0, {.check_bounds = false})));
    for (const auto& f : report.findings) std::cout << f.severity << ' ' << f.code << ' ' << f.message << '\n';
    return report.ok() ? kOk : kDomain;
}

int cmd_topo(const std::string& path, const std::string& format) {
    const Loaded m = load(path, 1.0);
    std::cout << (format == "dot" ? topology_dot(m.robot, m.topo) : topology_json(m.robot, m.topo));
    return kOk;
}

struct FkArgs {
    std::string model, lengths, ee;
    int trials = 0;
    std::uint64_t seed = 0;
    int repeats = 5;
    bool all_active = false;
};

int cmd_fk(const FkArgs& a) {
    const Loaded m = load(a.model, 1.0);
    if (a.trials > 0) {
        const FkTiming t = fk_timing(m.robot, m.topo, a.trials, a.seed, a.repeats, a.all_active);
        json counts = json::object(), mean_active = json::object(), coef = json::object();
        const char* names[] = {"A", "B", "C", "D"};
        for (int k = 0; k < 4; ++k) {
            int n = 0;
            for (const auto& act : m.robot.actuators) n += static_cast<int>(m.topo.of_actuator(act.id).type) == k;
            counts[names[k]] = n;
            double s = 0;
            for (const auto& tr : t.trials) s += tr.active[k];
            mean_active[names[k]] = t.trials.empty() ? 0.0 : s / t.trials.size();
            coef[std::string("t_") + names[k] + "_ms"] = t.per_type[k] * 1e3;
        }
        std::cout << json{{"robot", m.name},
                          {"trials", a.trials},
                          {"failures", t.failures},
                          {"type_counts", counts},
                          {"mean_active", mean_active},
                          {"mean_ms", t.mean_seconds * 1e3},
                          {"fit", coef},
                          {"r2", t.r2}}
                         .dump(2)
                  << '\n';
        return t.failures ? kDomain : kOk;
    }
    Configuration cfg = rest_configuration(m.robot);
    std::vector<double> L = cfg.lengths;
    if (!a.lengths.empty()) {
        std::vector<std::optional<double>> given(m.robot.n_actuators());
        for (const auto& [name, v] : parse_lengths(a.lengths)) {
            const int id = m.robot.actuator_id(name);
            if (id < 0) throw ContractError("unknown actuator '" + name + "'");
            given[id] = v;
        }
        for (const auto& it : m.topo.iteps)
            for (int g : it.group)
                if (given[g])
                    for (int h : it.group) L[h] = *given[g];
    }
    forward_kinematics(m.robot, m.topo, L, cfg);
    const int ee = end_effector(m, a.ee);
    double len_res = 0.0;
    for (int i = 0; i < m.robot.n_actuators(); ++i) len_res = std::max(len_res, std::abs(cfg.lengths[i] - L[i]));
    json out = configuration_json(m.robot, cfg);
    out["robot"] = m.name;
    out["end_effector"] = {{"link", m.robot.links[ee].name}, {"pose", pose_to_json(cfg.world[ee])}};
    out["residuals"] = {{"length", len_res}, {"closure", max_closure(m.robot, m.topo, cfg)}};
    std::cout << out.dump(2) << '\n';
    return kOk;
}

struct IkArgs {
    std::string model, target, ee, solver = "gss";
    int trials = 0;
    std::uint64_t seed = 0;
    double tol = 1e-6;
    int max_iterations = 200;
    int multistart = 1;
};

IkOptions ik_options(const IkArgs& a) {
    IkOptions o;
    const auto s = parse_solver(a.solver);
    if (!s) throw UsageError("unknown solver '" + a.solver + "'");
    o.solver = *s;
    o.tol = a.tol;
    o.max_iterations = a.max_iterations;
    o.multistart = a.multistart;
    o.seed = a.seed;
    return o;
}

int cmd_ik(const IkArgs& a) {
    const IkOptions opt = ik_options(a);
    const Loaded m = load(a.model, 1.0);
    const int ee = end_effector(m, a.ee);
    if (a.trials > 0) {
        const IkTrials t = ik_trials(m.robot, m.topo, ee, a.trials, a.seed, opt);
        std::cout << json{{"robot", m.name},
                          {"end_effector", m.robot.links[ee].name},
                          {"solver", a.solver},
                          {"trials", t.trials},
                          {"converged", t.converged},
                          {"success_rate", t.trials ? double(t.converged) / t.trials : 0.0},
                          {"median_iterations", t.median_iterations()},
                          {"median_ms", t.median_seconds() * 1e3},
                          {"mean_ms", t.mean_seconds() * 1e3},
                          {"median_psi", t.median_psi()},
                          {"p95_psi", t.p95_psi()}}
                         .dump(2)
                  << '\n';
        return kOk;
    }
    const Configuration rest = rest_configuration(m.robot);
    IkProblem p;
    p.end_effector = ee;
    p.target = a.target.empty() || a.target == "current" ? rest.world[ee] : pose_from_json(read_json_arg(a.target));
    p.options = opt;
    const IkResult r = solve_ik(m.robot, m.topo, rest, p);
    json lengths = json::object();
    for (const auto& act : m.robot.actuators) lengths[act.name] = r.lengths[act.id];
    std::cout << json{{"robot", m.name},
                      {"end_effector", m.robot.links[ee].name},
                      {"solver", a.solver},
                      {"lengths", lengths},
                      {"psi", r.psi},
                      {"trace", r.trace},
                      {"converged", r.converged},
                      {"iterations", r.iterations},
                      {"evaluations", r.evaluations},
                      {"pose", pose_to_json(r.config.world[ee])}}
                     .dump(2)
              << '\n';
    return kOk;
}

struct AppArgs {
    std::string model, ee, out = "-", format = "jsonl";
    std::vector<int> samples{11};
    long cap = 1'000'000;
    std::string via, interp = "linear";
    int points = 11;
    IkArgs ik;
};

int cmd_workspace(const AppArgs& a) {
    const Loaded m = load(a.model, 1.0);
    WorkspaceSpec spec;
    spec.end_effector = end_effector(m, a.ee);
    spec.samples = a.samples;
    spec.cap = a.cap;
    const auto samples = sample_workspace(m.robot, m.topo, rest_configuration(m.robot), spec);
    std::ofstream file;
    std::ostream& os = output(a.out, file);
    if (a.format == "csv") write_workspace_csv(os, m.robot, samples);
    else write_workspace_jsonl(os, samples);
    return kOk;
}

int cmd_trajectory(const AppArgs& a) {
    const IkOptions opt = ik_options(a.ik);
    const Loaded m = load(a.model, 1.0);
    const Configuration rest = rest_configuration(m.robot);
    TrajectorySpec spec;
    spec.end_effector = end_effector(m, a.ee);
    spec.samples = a.points;
    spec.interpolation = a.interp == "catmull-rom" ? Interpolation::CatmullRom : Interpolation::Linear;
    spec.ik = opt;
    if (a.via.empty()) {
        spec.via = {rest.world[spec.end_effector], rest.world[spec.end_effector]};
    } else {
        const json v = read_json_arg(a.via);
        if (!v.is_array()) throw UsageError("--via must be a JSON array of poses");
        for (const auto& p : v) spec.via.push_back(pose_from_json(p));
    }
    const auto pts = generate_trajectory(m.robot, m.topo, rest, spec);
    std::ofstream file;
    std::ostream& os = output(a.out, file);
    if (a.format == "csv") write_trajectory_csv(os, m.robot, pts);
    else write_trajectory_jsonl(os, pts);
    return kOk;
}

int serve_stdio() {
    Session s;
    std::string line;
    while (std::getline(std::cin, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::cout << s.handle_line(line) << '\n' << std::flush;
    }
    return kOk;
}

httplib::Server* g_server = nullptr;

int serve_port(const std::string& host, int port) {
    httplib::Server server;
    std::mutex mu;
    // sessions keyed by the X-Session header; each is served strictly in order
    std::map<std::string, std::pair<std::unique_ptr<std::mutex>, Session>> sessions;
    auto session_for = [&](const httplib::Request& req) -> std::pair<std::mutex*, Session*> {
        const std::string key = req.has_header("X-Session") ? req.get_header_value("X-Session") : "default";
        std::lock_guard<std::mutex> lock(mu);
        auto it = sessions.find(key);
        if (it == sessions.end())
            it = sessions.emplace(key, std::make_pair(std::make_unique<std::mutex>(), Session{})).first;
        return {it->second.first.get(), &it->second.second};
    };
    server.Post("/rpc", [&](const httplib::Request& req, httplib::Response& res) {
        auto [smu, s] = session_for(req);
        std::lock_guard<std::mutex> lock(*smu);
        std::stringstream in(req.body), out;
        std::string line;
        while (std::getline(in, line))
            if (line.find_first_not_of(" \t\r") != std::string::npos) out << s->handle_line(line) << '\n';
        res.set_header("Access-Control-Allow-Origin", "*");
        res.set_content(out.str(), "application/x-ndjson");
    });
    server.Options("/rpc", [](const httplib::Request&, httplib::Response& res) {
        res.set_header("Access-Control-Allow-Origin", "*");
        res.set_header("Access-Control-Allow-Headers", "Content-Type, X-Session");
    });
    server.Get("/health", [](const httplib::Request&, httplib::Response& res) { res.set_content("ok\n", "text/plain"); });
    g_server = &server;
    std::signal(SIGINT, [](int) {
        if (g_server) g_server->stop();
    });
    std::signal(SIGTERM, [](int) {
        if (g_server) g_server->stop();
    });
    std::cerr << "listening on http://" << host << ':' << port << "/rpc\n";
    if (!server.listen(host, port)) {
        std::cerr << "error: cannot listen on " << host << ':' << port << '\n';
        return kUsage;
    }
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Kinematics of actuator-driven closed-chain mechanisms"};
    app.require_subcommand(1);

    std::string model, format = "json";
    auto* validate_cmd = app.add_subcommand("validate", "Check a model; prints one finding per line");
    validate_cmd->add_option("model", model, "MRDF file or built-in name")->required();

    auto* topo_cmd = app.add_subcommand("topo", "Export four-bars, contracted graph and ITEPs");
    topo_cmd->add_option("model", model, "MRDF file or built-in name")->required();
    topo_cmd->add_option("--format", format, "json or dot")->check(CLI::IsMember({"json", "dot"}));

    FkArgs fk;
    auto* fk_cmd = app.add_subcommand("fk", "Forward kinematics, or timing trials with --trials");
    fk_cmd->add_option("model", fk.model, "MRDF file or built-in name")->required();
    fk_cmd->add_option("--lengths", fk.lengths, "name=value,... or JSON object or file");
    fk_cmd->add_option("--ee", fk.ee, "end-effector link");
    fk_cmd->add_option("--trials", fk.trials, "random activity patterns to time")->check(CLI::NonNegativeNumber);
    fk_cmd->add_option("--seed", fk.seed);
    fk_cmd->add_option("--repeats", fk.repeats, "runs per trial; the fastest is kept")->check(CLI::PositiveNumber);
    fk_cmd->add_flag("--all-active", fk.all_active, "move every redundancy group in each trial");

    IkArgs ik;
    auto add_ik_options = [](CLI::App* cmd, IkArgs& a) {
        cmd->add_option("--solver", a.solver, "gss, brent, newton or secant");
        cmd->add_option("--seed", a.seed);
        cmd->add_option("--tol", a.tol)->check(CLI::PositiveNumber);
        cmd->add_option("--max-iterations", a.max_iterations)->check(CLI::PositiveNumber);
        cmd->add_option("--multistart", a.multistart)->check(CLI::PositiveNumber);
    };
    auto* ik_cmd = app.add_subcommand("ik", "Inverse kinematics, or statistics over random reachable targets");
    ik_cmd->add_option("model", ik.model, "MRDF file or built-in name")->required();
    ik_cmd->add_option("--target", ik.target, "pose JSON or file; 'current' for the rest pose");
    ik_cmd->add_option("--ee", ik.ee, "end-effector link");
    ik_cmd->add_option("--trials", ik.trials)->check(CLI::NonNegativeNumber);
    add_ik_options(ik_cmd, ik);

    AppArgs ws;
    auto* ws_cmd = app.add_subcommand("workspace", "Sample end-effector poses over a grid of actuator lengths");
    ws_cmd->add_option("model", ws.model, "MRDF file or built-in name")->required();
    ws_cmd->add_option("--ee", ws.ee, "end-effector link");
    ws_cmd->add_option("--samples", ws.samples, "per relevant actuator, or one value for all")->delimiter(',');
    ws_cmd->add_option("--cap", ws.cap, "maximum grid size");
    ws_cmd->add_option("--format", ws.format)->check(CLI::IsMember({"jsonl", "csv"}));
    ws_cmd->add_option("--out", ws.out, "file, or - for stdout");

    AppArgs tr;
    auto* tr_cmd = app.add_subcommand("trajectory", "Solve IK along an interpolated via-point path");
    tr_cmd->add_option("model", tr.model, "MRDF file or built-in name")->required();
    tr_cmd->add_option("--ee", tr.ee, "end-effector link");
    tr_cmd->add_option("--via", tr.via, "JSON array of poses or file; default is the rest pose twice");
    tr_cmd->add_option("--points", tr.points, "samples along the path")->check(CLI::Range(2, 1000000));
    tr_cmd->add_option("--interp", tr.interp)->check(CLI::IsMember({"linear", "catmull-rom"}));
    tr_cmd->add_option("--format", tr.format)->check(CLI::IsMember({"jsonl", "csv"}));
    tr_cmd->add_option("--out", tr.out, "file, or - for stdout");
    add_ik_options(tr_cmd, tr.ik);

    bool stdio = false;
    int port = 0;
    std::string host = "127.0.0.1";
    auto* serve_cmd = app.add_subcommand("serve", "Newline-delimited JSON session service");
    auto* stdio_opt = serve_cmd->add_flag("--stdio", stdio, "serve on stdin/stdout");
    auto* port_opt = serve_cmd->add_option("--port", port, "serve HTTP POST /rpc on this port");
    serve_cmd->add_option("--host", host);
    stdio_opt->excludes(port_opt);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (*validate_cmd) return cmd_validate(model);
        if (*topo_cmd) return cmd_topo(model, format);
        if (*fk_cmd) return cmd_fk(fk);
        if (*ik_cmd) return cmd_ik(ik);
        if (*ws_cmd) return cmd_workspace(ws);
        if (*tr_cmd) return cmd_trajectory(tr);
        if (*serve_cmd) {
            if (stdio) return serve_stdio();
            if (*port_opt) return serve_port(host, port);
            std::cerr << "error: serve needs --stdio or --port\n";
            return kUsage;
        }
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kDomain;
    } catch (const json::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    }
    return kUsage;
}
