#pragma once

#include <json.hpp>
#include <optional>
#include <string>

#include "mkin/apps.hpp"

namespace mkin {

/// One wire-protocol session: a loaded robot, its topology and the current configuration.
/// Requests are {"id", "method", "params"}; responses {"id", "result"} or {"id", "error": {"code", "message"}}.
/// A failed request leaves the state and revision untouched.
class Session {
public:
    nlohmann::json handle(const nlohmann::json& request);
    /// Parses one NDJSON line; malformed JSON yields an error response with a null id.
    std::string handle_line(const std::string& line);

    long revision() const { return revision_; }
    bool loaded() const { return model_.has_value(); }

private:
    struct Model {
        std::string name;
        Robot robot;
        Topology topo;
        Configuration cfg;
    };

    nlohmann::json dispatch(const std::string& method, const nlohmann::json& params);
    nlohmann::json load_model(const nlohmann::json& params);
    nlohmann::json state() const;
    nlohmann::json set_lengths(const nlohmann::json& params);
    nlohmann::json set_target(const nlohmann::json& params);
    nlohmann::json sample(const nlohmann::json& params) const;
    const Model& require() const;
    int link_param(const nlohmann::json& params, const char* key) const;

    std::optional<Model> model_;
    long revision_ = 0;
};

}  // namespace mkin
