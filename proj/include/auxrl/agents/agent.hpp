#pragma once

#include <cmath>
#include <cstdint>
#include <memory>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "auxrl/env/environment.hpp"
#include "auxrl/io/checkpoint.hpp"
#include "auxrl/nn/adam.hpp"
#include "auxrl/nn/layers.hpp"
#include "auxrl/repr/representation.hpp"

namespace auxrl::agents {

enum class Algorithm { td3, sac };

std::string_view to_string(Algorithm a);
Algorithm algorithm_from_string(std::string_view s);

struct AgentConfig {
    Algorithm algorithm = Algorithm::td3;
    double gamma = 0.99;
    double tau = 0.005;
    int batch_size = 256;
    std::vector<int> hidden = {256, 256};
    double actor_lr = 3e-4;
    double critic_lr = 3e-4;
    double reward_scale = 1.0;  // rewards are multiplied by this in critic targets
    std::size_t buffer_capacity = 1'000'000;

    // TD3, in normalised action units
    double exploration_noise = 0.1;
    double target_noise = 0.2;
    double target_noise_clip = 0.5;
    int policy_delay = 2;

    // SAC
    double init_alpha = 0.1;
    bool auto_alpha = true;
    double alpha_lr = 3e-4;
    bool default_target_entropy = true;  // -dim(a)
    double target_entropy = 0.0;
    double log_std_min = -5.0;
    double log_std_max = 2.0;

    void validate() const;
    bool operator==(const AgentConfig&) const = default;
};

// Affine map between environment action bounds and [-1, 1].
class ActionScaler {
public:
    ActionScaler() = default;
    ActionScaler(Vec low, Vec high);
    Vec to_env(const Vec& normalized) const;
    Vec normalize(const Vec& env_action) const;
    const Vec& low() const { return low_; }
    const Vec& high() const { return high_; }

private:
    Vec low_, high_;
};

// Minibatch after encoding by the (frozen) representation.
struct EncodedBatch {
    Mat z_o;       // dim(z_o) x B
    Mat z_oa;      // dim(z_oa) x B, from the stored action
    Mat reward;    // 1 x B
    Mat next_z_o;  // dim(z_o) x B
    Mat done;      // 1 x B
    std::vector<std::size_t> indices;  // replay indices the batch came from
};

EncodedBatch encode_batch(const repr::Representation& rep, const Batch& batch);

struct UpdateInfo {
    float critic_loss = 0.0f;
    float actor_loss = 0.0f;
    float alpha = 0.0f;
    bool actor_updated = false;
};

// Off-policy actor-critic on top of a representation: the actor reads z_o,
// the critics read z_oa. The agent never writes to the representation.
class Agent {
public:
    virtual ~Agent() = default;
    Agent(const Agent&) = delete;
    Agent& operator=(const Agent&) = delete;

    // Action in environment units. explore=false is deterministic.
    virtual Vec select_action(const Vec& z_o, bool explore) = 0;
    virtual UpdateInfo update(const EncodedBatch& batch) = 0;

    // Actions (normalised units) used for the critic target at next_z_o.
    virtual Mat target_actions(const Mat& next_z_o) = 0;

    Algorithm algorithm() const { return cfg_.algorithm; }
    const AgentConfig& config() const { return cfg_; }
    const ActionScaler& scaler() const { return scaler_; }
    std::int64_t update_count() const { return updates_; }

    std::vector<const nn::Parameter<float>*> actor_parameters() const;
    std::vector<const nn::Parameter<float>*> critic_parameters() const;
    std::vector<const nn::Parameter<float>*> target_parameters() const;
    // Everything the agent owns, including SAC's temperature.
    std::vector<const nn::Parameter<float>*> parameters() const;
    std::uint64_t checksum() const { return nn::checksum(parameters()); }

    io::Checkpoint to_checkpoint() const;
    void load_checkpoint(const io::Checkpoint& ck);

protected:
    Agent(const AgentConfig& cfg, repr::Representation& rep, const env::EnvSpec& spec, std::uint64_t seed,
          Eigen::Index actor_out_dim, nn::Activation actor_out_act);

    Mat critic_min(nn::Mlp<float>& c1, nn::Mlp<float>& c2, const Mat& z_oa) const;
    float update_critics(const EncodedBatch& batch, const Mat& y);
    void soft_update_critics();

    AgentConfig cfg_;
    repr::Representation& rep_;
    ActionScaler scaler_;
    Eigen::Index action_dim_;
    std::mt19937_64 rng_;
    std::int64_t updates_ = 0;

    nn::Mlp<float> actor_, actor_target_;
    nn::Mlp<float> critic1_, critic2_, critic1_target_, critic2_target_;
    nn::Parameter<float> log_alpha_;
    nn::Adam<float> actor_opt_, critic_opt_;

    std::vector<nn::Parameter<float>*> mutable_actor_params();
    std::vector<nn::Parameter<float>*> mutable_critic_params();
};

class Td3Agent final : public Agent {
public:
    Td3Agent(const AgentConfig& cfg, repr::Representation& rep, const env::EnvSpec& spec, std::uint64_t seed);
    Vec select_action(const Vec& z_o, bool explore) override;
    UpdateInfo update(const EncodedBatch& batch) override;
    Mat target_actions(const Mat& next_z_o) override;
};

class SacAgent final : public Agent {
public:
    SacAgent(const AgentConfig& cfg, repr::Representation& rep, const env::EnvSpec& spec, std::uint64_t seed);
    Vec select_action(const Vec& z_o, bool explore) override;
    UpdateInfo update(const EncodedBatch& batch) override;
    Mat target_actions(const Mat& next_z_o) override;

    float alpha() const { return std::exp(log_alpha_.value(0, 0)); }
    double target_entropy() const { return target_entropy_; }

private:
    struct Sample {
        nn::Var<float> action;    // tanh-squashed, d x B
        nn::Var<float> log_prob;  // 1 x B
    };
    Sample sample(nn::Tape<float>& tape, nn::Var<float> z_o, const Mat& noise, bool frozen);
    Mat standard_normal(Eigen::Index rows, Eigen::Index cols);

    double target_entropy_;
    nn::Adam<float> alpha_opt_;
};

std::unique_ptr<Agent> make_agent(const AgentConfig& cfg, repr::Representation& rep, const env::EnvSpec& spec,
                                  std::uint64_t seed);

}  // namespace auxrl::agents
