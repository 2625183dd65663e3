#pragma once

#include <cstdint>
#include <vector>

#include "auxrl/nn/layers.hpp"
#include "auxrl/transition.hpp"

namespace auxrl::repr {

// What the agents consume: z_o for the actor, z_oa for the critics.
//
// The recorded encode_obs_action() is always frozen: gradients flow through it
// to z_o and the action (the actor needs dQ/da through the representation), but
// never into representation parameters.
class Representation {
public:
    virtual ~Representation() = default;

    virtual Eigen::Index obs_dim() const = 0;
    virtual Eigen::Index action_dim() const = 0;
    virtual Eigen::Index obs_feature_dim() const = 0;         // dim(z_o)
    virtual Eigen::Index obs_action_feature_dim() const = 0;  // dim(z_oa)

    virtual Mat encode_obs(const Mat& obs) const = 0;
    virtual Mat encode_obs_action(const Mat& z_o, const Mat& action) const = 0;
    virtual nn::Var<float> encode_obs_action(nn::Var<float> z_o, nn::Var<float> action) = 0;

    // FNV-1a over all representation parameters (0 parameters -> fixed value).
    virtual std::uint64_t checksum() const = 0;
};

// Baseline: z_o = o, z_oa = (o, a). Lets baseline runs share the
// representation code path.
class IdentityRepresentation final : public Representation {
public:
    IdentityRepresentation(Eigen::Index obs_dim, Eigen::Index action_dim) : obs_dim_(obs_dim), action_dim_(action_dim) {}

    Eigen::Index obs_dim() const override { return obs_dim_; }
    Eigen::Index action_dim() const override { return action_dim_; }
    Eigen::Index obs_feature_dim() const override { return obs_dim_; }
    Eigen::Index obs_action_feature_dim() const override { return obs_dim_ + action_dim_; }

    Mat encode_obs(const Mat& obs) const override;
    Mat encode_obs_action(const Mat& z_o, const Mat& action) const override;
    nn::Var<float> encode_obs_action(nn::Var<float> z_o, nn::Var<float> action) override;
    std::uint64_t checksum() const override { return nn::checksum<float>({}); }

private:
    Eigen::Index obs_dim_;
    Eigen::Index action_dim_;
};

}  // namespace auxrl::repr
