#include "auxrl/env/environment.hpp"

#include <algorithm>
#include <set>

#include "auxrl/env/linear_chain.hpp"
#include "auxrl/env/pendulum.hpp"
#include "auxrl/env/puck_slide.hpp"
#include "auxrl/errors.hpp"

namespace auxrl::env {

double Environment::compute_reward(const Vec&, const Vec&) const {
    throw UnsupportedOperation("environment '" + spec().id + "' is not goal-conditioned");
}

bool Environment::success(const Vec&, const Vec&) const {
    throw UnsupportedOperation("environment '" + spec().id + "' is not goal-conditioned");
}

Vec Environment::clip_action(const Vec& action) const {
    const EnvSpec& s = spec();
    if (action.size() != s.action_dim)
        throw ShapeError("environment '" + s.id + "': expected action dim " + std::to_string(s.action_dim) + ", got " +
                         std::to_string(action.size()));
    if (!action.allFinite()) throw InputError("environment '" + s.id + "': non-finite action");
    return action.cwiseMax(s.action_low).cwiseMin(s.action_high);
}

Vec achieved_goal_of(const EnvSpec& spec, const Vec& obs) {
    if (!spec.goal_conditioned()) throw UnsupportedOperation("'" + spec.id + "' has no goals");
    return obs.segment(spec.achieved_goal_offset(), spec.goal_dim);
}

Vec desired_goal_of(const EnvSpec& spec, const Vec& obs) {
    if (!spec.goal_conditioned()) throw UnsupportedOperation("'" + spec.id + "' has no goals");
    return obs.segment(spec.desired_goal_offset(), spec.goal_dim);
}

namespace {

void reject_unknown(const nlohmann::json& params, const std::set<std::string>& known, const std::string& env) {
    if (!params.is_object()) throw ConfigError("environment.params must be an object");
    for (const auto& [key, _] : params.items())
        if (!known.count(key)) throw ConfigError("environment.params: unknown key '" + key + "' for " + env);
}

template <typename V>
void read(const nlohmann::json& params, const char* key, V& out) {
    if (params.contains(key)) out = params.at(key).get<V>();
}

PuckSlideParams puck_params(const nlohmann::json& p) {
    reject_unknown(p,
                   {"table_half_size", "reach_radius", "max_speed", "friction", "contact_distance", "puck_min_radius",
                    "puck_max_radius", "goal_min_radius", "goal_max_radius", "success_threshold", "max_episode_steps"},
                   "puck_slide");
    PuckSlideParams out;
    read(p, "table_half_size", out.table_half_size);
    read(p, "reach_radius", out.reach_radius);
    read(p, "max_speed", out.max_speed);
    read(p, "friction", out.friction);
    read(p, "contact_distance", out.contact_distance);
    read(p, "puck_min_radius", out.puck_min_radius);
    read(p, "puck_max_radius", out.puck_max_radius);
    read(p, "goal_min_radius", out.goal_min_radius);
    read(p, "goal_max_radius", out.goal_max_radius);
    read(p, "success_threshold", out.success_threshold);
    read(p, "max_episode_steps", out.max_episode_steps);
    return out;
}

LinearChainParams chain_params(const nlohmann::json& p) {
    reject_unknown(p,
                   {"state_dim", "action_dim", "decay", "noise_std", "control_weight", "init_scale",
                    "max_episode_steps"},
                   "linear_chain");
    LinearChainParams out;
    read(p, "state_dim", out.state_dim);
    out.action_dim = std::max(1, out.state_dim / 4);
    read(p, "action_dim", out.action_dim);
    read(p, "decay", out.decay);
    read(p, "noise_std", out.noise_std);
    read(p, "control_weight", out.control_weight);
    read(p, "init_scale", out.init_scale);
    read(p, "max_episode_steps", out.max_episode_steps);
    return out;
}

}  // namespace

void EnvConfig::validate() const { (void)make_environment(*this); }

std::unique_ptr<Environment> make_environment(const EnvConfig& cfg) {
    try {
        if (cfg.id == "pendulum") {
            reject_unknown(cfg.params, {"max_episode_steps"}, "pendulum");
            return std::make_unique<Pendulum>(cfg.params.value("max_episode_steps", 200));
        }
        if (cfg.id == "puck_slide") return std::make_unique<PuckSlide>(puck_params(cfg.params));
        if (cfg.id == "linear_chain") return std::make_unique<LinearChain>(chain_params(cfg.params));
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("environment.params: " + std::string(e.what()));
    }
    if (cfg.id.empty()) throw ConfigError("environment.id is missing");
    throw ConfigError("environment.id: unknown environment '" + cfg.id + "' (expected pendulum, puck_slide or linear_chain)");
}

}  // namespace auxrl::env
