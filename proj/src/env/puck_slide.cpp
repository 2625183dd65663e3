#include "auxrl/env/puck_slide.hpp"

#include <cmath>
#include <numbers>

#include "auxrl/errors.hpp"

namespace auxrl::env {

void PuckSlideParams::validate() const {
    if (!(table_half_size > 0 && reach_radius > 0 && max_speed > 0 && friction >= 0 && contact_distance > 0))
        throw ConfigError("puck_slide: geometry parameters must be positive");
    if (!(puck_min_radius >= contact_distance && puck_max_radius >= puck_min_radius && puck_max_radius < reach_radius))
        throw ConfigError("puck_slide: puck must start within reach and clear of the actuator");
    if (!(goal_min_radius > reach_radius && goal_max_radius >= goal_min_radius))
        throw ConfigError("puck_slide: goal annulus must lie outside the reach radius");
    if (goal_max_radius > table_half_size) throw ConfigError("puck_slide: goal annulus exceeds the table");
    if (!(success_threshold > 0)) throw ConfigError("puck_slide: success_threshold must be > 0");
    if (max_episode_steps < 1) throw ConfigError("puck_slide: max_episode_steps must be >= 1");
}

PuckSlide::PuckSlide(PuckSlideParams params) : params_(params) {
    params_.validate();
    spec_.id = "puck_slide";
    spec_.obs_dim = 12;
    spec_.action_dim = 2;
    spec_.action_low = Vec::Constant(2, -1.0f);
    spec_.action_high = Vec::Constant(2, 1.0f);
    spec_.max_episode_steps = params_.max_episode_steps;
    spec_.goal_dim = 2;
    spec_.success_threshold = params_.success_threshold;
}

Vec PuckSlide::reset(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi), unit(0.0, 1.0);
    auto annulus = [&](double r0, double r1) {
        // area-uniform radius
        const double r = std::sqrt(r0 * r0 + unit(rng) * (r1 * r1 - r0 * r0));
        const double a = angle(rng);
        return Eigen::Vector2d(r * std::cos(a), r * std::sin(a));
    };
    state_ = PuckSlideState{};
    state_.puck = annulus(params_.puck_min_radius, params_.puck_max_radius);
    state_.goal = annulus(params_.goal_min_radius, params_.goal_max_radius);
    t_ = 0;
    return observation();
}

Vec PuckSlide::observation() const {
    Vec o(12);
    const double s = params_.max_speed;
    o << static_cast<float>(state_.actuator.x()), static_cast<float>(state_.actuator.y()),
        static_cast<float>(state_.actuator_velocity.x() / s), static_cast<float>(state_.actuator_velocity.y() / s),
        static_cast<float>(state_.puck.x()), static_cast<float>(state_.puck.y()),
        static_cast<float>(state_.puck_velocity.x() / s), static_cast<float>(state_.puck_velocity.y() / s),
        static_cast<float>(state_.puck.x()), static_cast<float>(state_.puck.y()), static_cast<float>(state_.goal.x()),
        static_cast<float>(state_.goal.y());
    return o;
}

double PuckSlide::compute_reward(const Vec& achieved_goal, const Vec& desired_goal) const {
    if (achieved_goal.size() != 2 || desired_goal.size() != 2) throw ShapeError("puck_slide: goals are 2-D");
    return -(achieved_goal.cast<double>() - desired_goal.cast<double>()).norm();
}

bool PuckSlide::success(const Vec& achieved_goal, const Vec& desired_goal) const {
    return -compute_reward(achieved_goal, desired_goal) < params_.success_threshold;
}

void PuckSlide::advance_puck(double fraction) {
    state_.puck += fraction * state_.puck_velocity;
    for (int k = 0; k < 2; ++k) {
        if (std::abs(state_.puck(k)) > params_.table_half_size) {
            state_.puck(k) = std::copysign(params_.table_half_size, state_.puck(k));
            state_.puck_velocity(k) = 0.0;
        }
    }
}

StepResult PuckSlide::step(const Vec& action) {
    const Vec a = clip_action(action);
    const Eigen::Vector2d start = state_.actuator;
    Eigen::Vector2d target = start + params_.max_speed * a.cast<double>();
    if (target.norm() > params_.reach_radius) target *= params_.reach_radius / target.norm();
    const Eigen::Vector2d motion = target - start;

    // Earliest fraction of the actuator path at which it touches the puck.
    // Solve |puck - (start + s * motion)| = contact_distance for s in [0, 1].
    double hit = -1.0;
    const Eigen::Vector2d rel = state_.puck - start;
    if (rel.norm() <= params_.contact_distance) {
        hit = 0.0;
    } else if (motion.squaredNorm() > 0.0) {
        const double qa = motion.squaredNorm();
        const double qb = -2.0 * rel.dot(motion);
        const double qc = rel.squaredNorm() - params_.contact_distance * params_.contact_distance;
        const double disc = qb * qb - 4.0 * qa * qc;
        if (disc >= 0.0) {
            const double s = (-qb - std::sqrt(disc)) / (2.0 * qa);
            if (s >= 0.0 && s <= 1.0) hit = s;
        }
    }

    if (hit >= 0.0) {
        const Eigen::Vector2d at = start + hit * motion;
        advance_puck(hit);
        Eigen::Vector2d n = state_.puck - at;
        n = n.norm() > 0.0 ? Eigen::Vector2d(n.normalized()) : Eigen::Vector2d(motion.normalized());
        const double closing = (motion - state_.puck_velocity).dot(n);
        // elastic strike from a much heavier actuator
        if (closing > 0.0) state_.puck_velocity += 2.0 * closing * n;
        state_.puck = at + params_.contact_distance * n;
        advance_puck(1.0 - hit);
    } else {
        advance_puck(1.0);
    }

    const double speed = state_.puck_velocity.norm();
    if (speed > 0.0) {
        const double slowed = std::max(0.0, speed - params_.friction);
        state_.puck_velocity *= slowed / speed;
    }

    // the puck never stays inside the actuator
    const Eigen::Vector2d gap = state_.puck - target;
    if (gap.norm() < params_.contact_distance && gap.norm() > 0.0)
        state_.puck = target + params_.contact_distance * gap.normalized();

    state_.actuator = target;
    state_.actuator_velocity = motion;
    ++t_;

    StepResult r;
    r.observation = observation();
    const Vec achieved = r.observation.segment(8, 2), desired = r.observation.segment(10, 2);
    r.reward = compute_reward(achieved, desired);
    r.success = success(achieved, desired);
    r.done = t_ >= spec_.max_episode_steps;
    return r;
}

}  // namespace auxrl::env
