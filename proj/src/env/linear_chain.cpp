#include "auxrl/env/linear_chain.hpp"

#include <Eigen/Eigenvalues>

#include "auxrl/errors.hpp"

namespace auxrl::env {

void LinearChainParams::validate() const {
    if (state_dim < 1) throw ConfigError("linear_chain: state_dim must be >= 1");
    if (action_dim < 1 || action_dim > state_dim) throw ConfigError("linear_chain: action_dim must be in [1, state_dim]");
    if (!(decay > 0.0 && decay < 1.05)) throw ConfigError("linear_chain: decay must be in (0, 1.05)");
    if (!(noise_std >= 0.0)) throw ConfigError("linear_chain: noise_std must be >= 0");
    if (!(control_weight >= 0.0)) throw ConfigError("linear_chain: control_weight must be >= 0");
    if (!(init_scale >= 0.0)) throw ConfigError("linear_chain: init_scale must be >= 0");
    if (max_episode_steps < 1) throw ConfigError("linear_chain: max_episode_steps must be >= 1");
}

LinearChain::LinearChain(LinearChainParams params) : params_(params) {
    params_.validate();
    const int n = params_.state_dim, m = params_.action_dim;
    spec_.id = "linear_chain";
    spec_.obs_dim = n;
    spec_.action_dim = m;
    spec_.action_low = Vec::Constant(m, -1.0f);
    spec_.action_high = Vec::Constant(m, 1.0f);
    spec_.max_episode_steps = params_.max_episode_steps;

    a_ = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) a_(i, (i + n - 1) % n) = params_.decay;
    b_ = Eigen::MatrixXd::Zero(n, m);
    for (int j = 0; j < m; ++j) {
        const int idx = j * n / m;
        actuated_.push_back(idx);
        b_(idx, j) = 1.0;
    }
    x_ = Eigen::VectorXd::Zero(n);
}

double LinearChain::spectral_radius() const {
    Eigen::EigenSolver<Eigen::MatrixXd> es(a_, false);
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

Vec LinearChain::reset(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-params_.init_scale, params_.init_scale);
    for (Eigen::Index i = 0; i < x_.size(); ++i) x_(i) = u(rng);
    noise_rng_.seed(rng());
    t_ = 0;
    return observation();
}

void LinearChain::set_state(const Eigen::VectorXd& x) {
    if (x.size() != x_.size()) throw ShapeError("linear_chain: state dimension mismatch");
    x_ = x;
}

StepResult LinearChain::step(const Vec& action) {
    const Eigen::VectorXd u = clip_action(action).cast<double>();
    const double reward = -x_.squaredNorm() - params_.control_weight * u.squaredNorm();
    Eigen::VectorXd next = a_ * x_ + b_ * u;
    if (params_.noise_std > 0.0) {
        std::normal_distribution<double> noise(0.0, params_.noise_std);
        for (Eigen::Index i = 0; i < next.size(); ++i) next(i) += noise(noise_rng_);
    }
    x_ = next;
    ++t_;

    StepResult r;
    r.observation = observation();
    r.reward = reward;
    r.done = t_ >= spec_.max_episode_steps;
    return r;
}

}  // namespace auxrl::env
