#include "auxrl/agents/her.hpp"

#include "auxrl/errors.hpp"

namespace auxrl::agents {

void HerConfig::validate() const {
    if (k < 1) throw ConfigError("her.k must be >= 1");
}

std::vector<Transition> her_copies(const std::vector<Transition>& episode, const HerConfig& cfg,
                                   const env::Environment& env, std::mt19937_64& rng) {
    cfg.validate();
    const env::EnvSpec& spec = env.spec();
    if (!spec.goal_conditioned()) throw UnsupportedOperation("HER needs a goal-conditioned environment, got '" + spec.id + "'");
    const Eigen::Index g = spec.goal_dim, off = spec.desired_goal_offset();
    for (const auto& t : episode) {
        if (!t.has_goals() || t.achieved_goal.size() != g || t.desired_goal.size() != g)
            throw UnsupportedOperation("HER: transition without matching goal fields");
        if (t.obs.size() != spec.obs_dim || t.next_obs.size() != spec.obs_dim)
            throw ShapeError("HER: observation dimension mismatch");
    }

    std::vector<Transition> out;
    out.reserve(episode.size() * static_cast<std::size_t>(cfg.k));
    const std::size_t n = episode.size();
    for (std::size_t t = 0; t < n; ++t) {
        std::uniform_int_distribution<std::size_t> pick(t, n - 1);
        for (int c = 0; c < cfg.k; ++c) {
            const Vec& goal = episode[pick(rng)].achieved_goal;
            Transition r = episode[t];
            r.desired_goal = goal;
            r.obs.segment(off, g) = goal;
            r.next_obs.segment(off, g) = goal;
            r.reward = static_cast<float>(env.compute_reward(r.achieved_goal, goal));
            out.push_back(std::move(r));
        }
    }
    return out;
}

std::vector<Transition> her_relabel(const std::vector<Transition>& episode, const HerConfig& cfg,
                                    const env::Environment& env, std::mt19937_64& rng) {
    std::vector<Transition> out = episode;
    for (auto& c : her_copies(episode, cfg, env, rng)) out.push_back(std::move(c));
    return out;
}

}  // namespace auxrl::agents
