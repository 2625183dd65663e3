#include "auxrl/env/pendulum.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "auxrl/errors.hpp"

namespace auxrl::env {

Pendulum::Pendulum(int max_episode_steps) {
    if (max_episode_steps < 1) throw ConfigError("pendulum: max_episode_steps must be >= 1");
    spec_.id = "pendulum";
    spec_.obs_dim = 3;
    spec_.action_dim = 1;
    spec_.action_low = Vec::Constant(1, static_cast<float>(-kMaxTorque));
    spec_.action_high = Vec::Constant(1, static_cast<float>(kMaxTorque));
    spec_.max_episode_steps = max_episode_steps;
}

double Pendulum::angle_normalize(double x) {
    constexpr double pi = std::numbers::pi;
    double r = std::fmod(x + pi, 2.0 * pi);
    if (r < 0.0) r += 2.0 * pi;
    return r - pi;
}

double Pendulum::energy(const PendulumState& s) {
    const double k = 3.0 * kGravity / (2.0 * kLength);
    return 0.5 * s.theta_dot * s.theta_dot + k * (1.0 + std::cos(s.theta));
}

Vec Pendulum::reset(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> angle(-std::numbers::pi, std::numbers::pi), speed(-1.0, 1.0);
    state_.theta = angle(rng);
    state_.theta_dot = speed(rng);
    t_ = 0;
    return observation();
}

void Pendulum::set_state(PendulumState s) {
    s.theta = angle_normalize(s.theta);
    s.theta_dot = std::clamp(s.theta_dot, -kMaxSpeed, kMaxSpeed);
    state_ = s;
}

Vec Pendulum::observation() const {
    Vec o(3);
    o << static_cast<float>(std::cos(state_.theta)), static_cast<float>(std::sin(state_.theta)),
        static_cast<float>(state_.theta_dot);
    return o;
}

StepResult Pendulum::step(const Vec& action) {
    const double u = clip_action(action)(0);
    const double th = state_.theta, thdot = state_.theta_dot;
    const double an = angle_normalize(th);
    const double cost = an * an + 0.1 * thdot * thdot + 0.001 * u * u;

    // semi-implicit Euler: velocity first, position from the new velocity
    double new_thdot =
        thdot + (3.0 * kGravity / (2.0 * kLength) * std::sin(th) + 3.0 / (kMass * kLength * kLength) * u) * kDt;
    new_thdot = std::clamp(new_thdot, -kMaxSpeed, kMaxSpeed);
    state_.theta = angle_normalize(th + new_thdot * kDt);
    state_.theta_dot = new_thdot;
    ++t_;

    StepResult r;
    r.observation = observation();
    r.reward = -cost;
    r.done = t_ >= spec_.max_episode_steps;
    return r;
}

}  // namespace auxrl::env
