#include "auxrl/train/collector.hpp"

#include <nlohmann/json.hpp>

#include "auxrl/errors.hpp"
#include "auxrl/seeding.hpp"

namespace auxrl::train {

namespace {

constexpr std::uint64_t kEpisodeStream = 11;
constexpr std::uint64_t kHerStream = 12;

std::vector<float> to_list(const Vec& v) { return {v.data(), v.data() + v.size()}; }

}  // namespace

Collector::Collector(env::Environment& env, agents::ReplayBuffer& buffer, agents::HerConfig her, std::uint64_t seed)
    : env_(env),
      buffer_(buffer),
      her_(her),
      scaler_(env.spec().action_low, env.spec().action_high),
      seed_(seed),
      her_rng_(derive_seed(seed, kHerStream)) {
    if (her_.enabled) {
        her_.validate();
        if (!env.goal_conditioned())
            throw ConfigError("her is enabled but environment '" + env.spec().id + "' is not goal-conditioned");
    }
    begin_episode();
}

void Collector::begin_episode() {
    obs_ = env_.reset(derive_seed(seed_, kEpisodeStream, static_cast<std::uint64_t>(episodes_)));
    episode_.clear();
}

const Transition& Collector::step(const Vec& normalized_action) {
    const env::EnvSpec& spec = env_.spec();
    const Vec action = normalized_action.cwiseMax(-1.0f).cwiseMin(1.0f);
    const env::StepResult r = env_.step(scaler_.to_env(action));

    Transition t;
    t.obs = obs_;
    t.action = action;
    t.reward = static_cast<float>(r.reward);
    t.next_obs = r.observation;
    t.done = r.terminal;
    if (spec.goal_conditioned()) {
        t.achieved_goal = env::achieved_goal_of(spec, r.observation);
        t.desired_goal = env::desired_goal_of(spec, obs_);
    }
    if (sink_) write_transition_jsonl(*sink_, steps_, t);
    ++steps_;

    buffer_.add(t);
    if (her_.enabled) episode_.push_back(t);
    last_ = std::move(t);

    if (r.done || r.terminal) {
        if (her_.enabled)
            for (auto& c : agents::her_copies(episode_, her_, env_, her_rng_)) buffer_.add(std::move(c));
        ++episodes_;
        begin_episode();
    } else {
        obs_ = r.observation;
    }
    return last_;
}

void write_transition_jsonl(std::ostream& out, std::int64_t t, const Transition& tr) {
    nlohmann::json j = {{"t", t},
                        {"obs", to_list(tr.obs)},
                        {"action", to_list(tr.action)},
                        {"reward", tr.reward},
                        {"next_obs", to_list(tr.next_obs)},
                        {"done", tr.done},
                        {"achieved_goal", to_list(tr.achieved_goal)},
                        {"desired_goal", to_list(tr.desired_goal)}};
    out << j.dump() << '\n';
}

void pretrain(Collector& collector, repr::OfeNet* net, std::int64_t env_steps, std::mt19937_64& rng) {
    if (env_steps < 0) throw ConfigError("pretrain_steps must be >= 0");
    const Eigen::Index d = collector.scaler().low().size();
    std::uniform_real_distribution<float> u(-1.0f, 1.0f);
    Vec a(d);
    for (std::int64_t i = 0; i < env_steps; ++i) {
        for (Eigen::Index k = 0; k < d; ++k) a(k) = u(rng);
        collector.step(a);
    }
    if (net) net->pretrain_on(collector.buffer(), net->config().pretrain_steps, rng);
}

}  // namespace auxrl::train
