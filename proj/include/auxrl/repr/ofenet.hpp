#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "auxrl/agents/replay_buffer.hpp"
#include "auxrl/io/checkpoint.hpp"
#include "auxrl/nn/adam.hpp"
#include "auxrl/nn/layers.hpp"
#include "auxrl/repr/representation.hpp"

namespace auxrl::repr {

enum class AuxTask { rwp, fsp, fsdp };

std::string_view to_string(AuxTask t);
AuxTask aux_task_from_string(std::string_view s);

// 1 for reward prediction, dim(o) for the two forward-model tasks.
Eigen::Index target_dim(AuxTask task, Eigen::Index obs_dim);

struct RepresentationConfig {
    int layers_per_part = 2;  // L: DenseNet blocks in each part
    int width = 10;           // W: units per block
    AuxTask task = AuxTask::fsp;
    int pretrain_steps = 1000;  // gradient updates on the random-policy data
    double learning_rate = 3e-4;
    int batch_size = 256;
    nn::Activation activation = nn::Activation::swish;

    void validate() const;
    bool operator==(const RepresentationConfig&) const = default;
};

struct RepresentationDims {
    Eigen::Index obs_features;         // dim(z_o)  = dim(o) + L*W
    Eigen::Index obs_action_features;  // dim(z_oa) = dim(z_o) + dim(a) + L*W
};

RepresentationDims representation_dims(Eigen::Index obs_dim, Eigen::Index action_dim, int layers_per_part, int width);

// r_{t+1} for rwp, o_{t+1} for fsp, o_{t+1} - o_t for fsdp.
Vec aux_target(AuxTask task, const Transition& t);
Mat aux_targets(AuxTask task, const Batch& batch);

// Per-dimension standardisation of auxiliary targets. Dimensions with
// negligible spread keep unit scale.
struct TargetNormalizer {
    Vec mean;
    Vec stddev;

    static TargetNormalizer identity(Eigen::Index dim);
    static TargetNormalizer fit(const Mat& targets);
    Mat apply(const Mat& targets) const;
    Mat invert(const Mat& standardized) const;
};

// Pretraining rewards whose standard deviation falls below this carry no
// signal for reward prediction.
inline constexpr double kMinRewardStddev = 1e-6;

// Throws DegenerateRewardError when rwp would be trained on constant rewards.
void check_reward_signal(AuxTask task, const std::vector<Transition>& data);

// Two DenseNet parts plus a linear prediction head on z_oa.
class OfeNet final : public Representation {
public:
    OfeNet(Eigen::Index obs_dim, Eigen::Index action_dim, const RepresentationConfig& cfg, std::uint64_t seed);
    OfeNet(const OfeNet&) = delete;
    OfeNet& operator=(const OfeNet&) = delete;

    Eigen::Index obs_dim() const override { return obs_dim_; }
    Eigen::Index action_dim() const override { return action_dim_; }
    Eigen::Index obs_feature_dim() const override { return part1_.out_dim(); }
    Eigen::Index obs_action_feature_dim() const override { return part2_.out_dim(); }

    Mat encode_obs(const Mat& obs) const override;
    Mat encode_obs_action(const Mat& z_o, const Mat& action) const override;
    nn::Var<float> encode_obs_action(nn::Var<float> z_o, nn::Var<float> action) override;
    std::uint64_t checksum() const override;

    const RepresentationConfig& config() const { return cfg_; }
    AuxTask task() const { return cfg_.task; }

    // Head output mapped back to target units.
    Mat predict(const Mat& obs, const Mat& action) const;

    // One Adam step on the MSE between head(z_oa) and the standardised
    // targets of the batch. Returns the loss before the update.
    float aux_train_step(const Batch& batch);

    // Fits target statistics and checks the reward signal, then runs
    // `updates` minibatch steps on uniformly sampled buffer entries.
    void pretrain_on(const agents::ReplayBuffer& buffer, int updates, std::mt19937_64& rng);

    const TargetNormalizer& normalizer() const { return normalizer_; }
    void set_normalizer(TargetNormalizer n);

    std::vector<nn::Parameter<float>*> parameters();
    std::vector<const nn::Parameter<float>*> parameters() const;

    io::Checkpoint to_checkpoint() const;
    static std::unique_ptr<OfeNet> from_checkpoint(const io::Checkpoint& ck);
    void save(const std::filesystem::path& path) const { to_checkpoint().save(path); }
    static std::unique_ptr<OfeNet> load(const std::filesystem::path& path) { return from_checkpoint(io::Checkpoint::load(path)); }

private:
    Eigen::Index obs_dim_;
    Eigen::Index action_dim_;
    RepresentationConfig cfg_;
    nn::DenseNet<float> part1_;
    nn::DenseNet<float> part2_;
    nn::DenseLayer<float> head_;
    TargetNormalizer normalizer_;
    nn::Adam<float> optimizer_;
};

}  // namespace auxrl::repr
