#pragma once

#include <random>

#include <Eigen/Dense>

#include "auxrl/env/environment.hpp"

namespace auxrl::env {

// Geometry and friction of the sliding-puck task. Lengths in metres, time in
// environment steps.
struct PuckSlideParams {
    double table_half_size = 1.5;
    double reach_radius = 0.5;      // actuator is confined to this disk around the origin
    double max_speed = 0.05;        // actuator speed per axis at |action| = 1
    double friction = 0.005;        // puck deceleration per step
    double contact_distance = 0.06; // actuator radius + puck radius
    double puck_min_radius = 0.15;
    double puck_max_radius = 0.3;
    double goal_min_radius = 0.8;
    double goal_max_radius = 1.4;
    double success_threshold = 0.05;
    int max_episode_steps = 100;

    void validate() const;
};

struct PuckSlideState {
    Eigen::Vector2d actuator = Eigen::Vector2d::Zero();
    Eigen::Vector2d actuator_velocity = Eigen::Vector2d::Zero();
    Eigen::Vector2d puck = Eigen::Vector2d::Zero();
    Eigen::Vector2d puck_velocity = Eigen::Vector2d::Zero();
    Eigen::Vector2d goal = Eigen::Vector2d::Zero();
};

// Goal-conditioned puck slide on a low-friction table. The actuator strikes
// the puck like a heavy elastic bat; the goal lies beyond the actuator's reach
// so the puck has to be sent sliding. Reward is the negative puck-goal distance,
// constant until the first contact.
//
// Observation (12): actuator xy, actuator velocity xy, puck xy, puck velocity
// xy, achieved goal xy (= puck), desired goal xy. Velocities are reported in
// units of max_speed.
class PuckSlide final : public Environment {
public:
    explicit PuckSlide(PuckSlideParams params = {});

    const EnvSpec& spec() const override { return spec_; }
    Vec reset(std::uint64_t seed) override;
    StepResult step(const Vec& action) override;

    double compute_reward(const Vec& achieved_goal, const Vec& desired_goal) const override;
    bool success(const Vec& achieved_goal, const Vec& desired_goal) const override;

    const PuckSlideState& state() const { return state_; }
    void set_state(const PuckSlideState& s) { state_ = s; }
    const PuckSlideParams& params() const { return params_; }
    Vec observation() const;

private:
    void advance_puck(double fraction);

    PuckSlideParams params_;
    EnvSpec spec_;
    PuckSlideState state_;
    int t_ = 0;
};

}  // namespace auxrl::env
