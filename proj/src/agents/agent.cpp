#include "auxrl/agents/agent.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "auxrl/errors.hpp"

namespace auxrl::agents {

std::string_view to_string(Algorithm a) { return a == Algorithm::td3 ? "td3" : "sac"; }

Algorithm algorithm_from_string(std::string_view s) {
    if (s == "td3") return Algorithm::td3;
    if (s == "sac") return Algorithm::sac;
    throw ConfigError("unknown algorithm '" + std::string(s) + "' (expected td3 or sac)");
}

void AgentConfig::validate() const {
    if (!(gamma >= 0.0 && gamma <= 1.0)) throw ConfigError("agent.gamma must be in [0, 1]");
    if (!(tau > 0.0 && tau <= 1.0)) throw ConfigError("agent.tau must be in (0, 1]");
    if (batch_size < 1) throw ConfigError("agent.batch_size must be >= 1");
    if (hidden.empty()) throw ConfigError("agent.hidden needs at least one layer");
    for (int h : hidden)
        if (h < 1) throw ConfigError("agent.hidden sizes must be >= 1");
    if (!(actor_lr > 0.0) || !(critic_lr > 0.0) || !(alpha_lr > 0.0)) throw ConfigError("agent learning rates must be > 0");
    if (!(reward_scale > 0.0) || !std::isfinite(reward_scale)) throw ConfigError("agent.reward_scale must be > 0");
    if (buffer_capacity < 1) throw ConfigError("agent.buffer_capacity must be >= 1");
    if (exploration_noise < 0.0 || target_noise < 0.0 || target_noise_clip < 0.0)
        throw ConfigError("agent noise scales must be >= 0");
    if (policy_delay < 1) throw ConfigError("agent.policy_delay must be >= 1");
    if (!(init_alpha > 0.0)) throw ConfigError("agent.init_alpha must be > 0");
    if (!(log_std_min < log_std_max)) throw ConfigError("agent.log_std_min must be < log_std_max");
}

ActionScaler::ActionScaler(Vec low, Vec high) : low_(std::move(low)), high_(std::move(high)) {
    if (low_.size() != high_.size()) throw ShapeError("action bounds differ in length");
    if (!low_.allFinite() || !high_.allFinite() || (high_.array() <= low_.array()).any())
        throw ConfigError("action bounds must be finite with low < high");
}

Vec ActionScaler::to_env(const Vec& normalized) const {
    const Vec clipped = normalized.cwiseMax(-1.0f).cwiseMin(1.0f);
    Vec out = low_.array() + (clipped.array() + 1.0f) * 0.5f * (high_ - low_).array();
    return out.cwiseMax(low_).cwiseMin(high_);
}

Vec ActionScaler::normalize(const Vec& env_action) const {
    Vec out = (2.0f * (env_action - low_).array() / (high_ - low_).array() - 1.0f).matrix();
    return out.cwiseMax(-1.0f).cwiseMin(1.0f);
}

EncodedBatch encode_batch(const repr::Representation& rep, const Batch& batch) {
    EncodedBatch e;
    e.z_o = rep.encode_obs(batch.obs);
    e.z_oa = rep.encode_obs_action(e.z_o, batch.action);
    e.next_z_o = rep.encode_obs(batch.next_obs);
    e.reward = batch.reward;
    e.done = batch.done;
    e.indices = batch.indices;
    return e;
}

namespace {

std::vector<Eigen::Index> hidden_sizes(const std::vector<int>& h) { return {h.begin(), h.end()}; }

template <typename Net>
void append(std::vector<const nn::Parameter<float>*>& out, const Net& net) {
    net.collect(out);
}

}  // namespace

Agent::Agent(const AgentConfig& cfg, repr::Representation& rep, const env::EnvSpec& spec, std::uint64_t seed,
             Eigen::Index actor_out_dim, nn::Activation actor_out_act)
    : cfg_(cfg), rep_(rep), scaler_(spec.action_low, spec.action_high), action_dim_(spec.action_dim), rng_(seed) {
    cfg_.validate();
    if (rep.action_dim() != spec.action_dim || rep.obs_dim() != spec.obs_dim)
        throw ShapeError("agent: representation does not match the environment");
    const auto hidden = hidden_sizes(cfg_.hidden);
    actor_ = nn::Mlp<float>(rep.obs_feature_dim(), hidden, actor_out_dim, nn::Activation::relu, actor_out_act, "actor");
    critic1_ = nn::Mlp<float>(rep.obs_action_feature_dim(), hidden, 1, nn::Activation::relu, nn::Activation::identity, "critic1");
    critic2_ = nn::Mlp<float>(rep.obs_action_feature_dim(), hidden, 1, nn::Activation::relu, nn::Activation::identity, "critic2");
    actor_.initialize(rng_);
    critic1_.initialize(rng_);
    critic2_.initialize(rng_);
    actor_target_ = actor_;
    critic1_target_ = critic1_;
    critic2_target_ = critic2_;
    // rename target copies so checkpoints stay unambiguous
    auto rename = [](nn::Mlp<float>& net, const std::string& prefix) {
        std::vector<nn::Parameter<float>*> ps;
        net.collect(ps);
        for (auto* p : ps) p->name = prefix + p->name;
    };
    rename(actor_target_, "target.");
    rename(critic1_target_, "target.");
    rename(critic2_target_, "target.");
    log_alpha_ = nn::Parameter<float>("log_alpha", Mat::Constant(1, 1, static_cast<float>(std::log(cfg_.init_alpha))));

    nn::AdamOptions a;
    a.learning_rate = cfg_.actor_lr;
    actor_opt_ = nn::Adam<float>(mutable_actor_params(), a);
    nn::AdamOptions c;
    c.learning_rate = cfg_.critic_lr;
    critic_opt_ = nn::Adam<float>(mutable_critic_params(), c);
}

std::vector<nn::Parameter<float>*> Agent::mutable_actor_params() {
    std::vector<nn::Parameter<float>*> out;
    actor_.collect(out);
    return out;
}

std::vector<nn::Parameter<float>*> Agent::mutable_critic_params() {
    std::vector<nn::Parameter<float>*> out;
    critic1_.collect(out);
    critic2_.collect(out);
    return out;
}

std::vector<const nn::Parameter<float>*> Agent::actor_parameters() const {
    std::vector<const nn::Parameter<float>*> out;
    append(out, actor_);
    return out;
}

std::vector<const nn::Parameter<float>*> Agent::critic_parameters() const {
    std::vector<const nn::Parameter<float>*> out;
    append(out, critic1_);
    append(out, critic2_);
    return out;
}

std::vector<const nn::Parameter<float>*> Agent::target_parameters() const {
    std::vector<const nn::Parameter<float>*> out;
    if (cfg_.algorithm == Algorithm::td3) append(out, actor_target_);
    append(out, critic1_target_);
    append(out, critic2_target_);
    return out;
}

std::vector<const nn::Parameter<float>*> Agent::parameters() const {
    auto out = actor_parameters();
    for (auto* p : critic_parameters()) out.push_back(p);
    for (auto* p : target_parameters()) out.push_back(p);
    if (cfg_.algorithm == Algorithm::sac) out.push_back(&log_alpha_);
    return out;
}

Mat Agent::critic_min(nn::Mlp<float>& c1, nn::Mlp<float>& c2, const Mat& z_oa) const {
    return c1.forward(z_oa).cwiseMin(c2.forward(z_oa));
}

float Agent::update_critics(const EncodedBatch& batch, const Mat& y) {
    critic_opt_.zero_grad();
    nn::Tape<float> tape;
    nn::Var<float> in = tape.constant(batch.z_oa);
    nn::Var<float> target = tape.constant(y);
    nn::Var<float> loss = nn::add(nn::mse(critic1_.forward(in), target), nn::mse(critic2_.forward(in), target));
    const float value = loss.value()(0, 0);
    if (!std::isfinite(value))
        throw NumericError(std::string(to_string(cfg_.algorithm)) + ": critic loss became non-finite at update " +
                           std::to_string(updates_));
    tape.backward(loss);
    critic_opt_.step();
    return value;
}

void Agent::soft_update_critics() {
    std::vector<nn::Parameter<float>*> t1, o1, t2, o2;
    critic1_target_.collect(t1);
    critic1_.collect(o1);
    critic2_target_.collect(t2);
    critic2_.collect(o2);
    nn::soft_update(t1, o1, static_cast<float>(cfg_.tau));
    nn::soft_update(t2, o2, static_cast<float>(cfg_.tau));
}

io::Checkpoint Agent::to_checkpoint() const {
    io::Checkpoint ck;
    ck.meta = {{"kind", "agent"},
               {"algorithm", std::string(to_string(cfg_.algorithm))},
               {"updates", updates_},
               {"obs_feature_dim", rep_.obs_feature_dim()},
               {"obs_action_feature_dim", rep_.obs_action_feature_dim()},
               {"action_dim", action_dim_}};
    for (const auto* p : parameters()) ck.add(p->name, p->value);
    return ck;
}

void Agent::load_checkpoint(const io::Checkpoint& ck) {
    if (ck.meta.value("kind", "") != "agent" || ck.meta.value("algorithm", "") != to_string(cfg_.algorithm))
        throw InputError("checkpoint does not hold a " + std::string(to_string(cfg_.algorithm)) + " agent");
    for (const auto* cp : parameters()) {
        auto* p = const_cast<nn::Parameter<float>*>(cp);
        const Mat& v = ck.get(p->name);
        if (v.rows() != p->value.rows() || v.cols() != p->value.cols())
            throw ShapeError("checkpoint array '" + p->name + "' has the wrong shape");
        p->value = v;
    }
    updates_ = ck.meta.at("updates").get<std::int64_t>();
}

// ---------------------------------------------------------------------------
// TD3

Td3Agent::Td3Agent(const AgentConfig& cfg, repr::Representation& rep, const env::EnvSpec& spec, std::uint64_t seed)
    : Agent(cfg, rep, spec, seed, spec.action_dim, nn::Activation::tanh) {}

Vec Td3Agent::select_action(const Vec& z_o, bool explore) {
    if (z_o.size() != actor_.in_dim()) throw ShapeError("td3: z_o dimension mismatch");
    Vec a = actor_.forward(Mat(z_o)).col(0);
    if (explore && cfg_.exploration_noise > 0.0) {
        std::normal_distribution<float> n(0.0f, static_cast<float>(cfg_.exploration_noise));
        for (Eigen::Index i = 0; i < a.size(); ++i) a(i) += n(rng_);
    }
    return scaler_.to_env(a);
}

Mat Td3Agent::target_actions(const Mat& next_z_o) {
    Mat a = actor_target_.forward(next_z_o);
    std::normal_distribution<float> n(0.0f, static_cast<float>(cfg_.target_noise));
    const float clip = static_cast<float>(cfg_.target_noise_clip);
    for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] += std::clamp(n(rng_), -clip, clip);
    return a.cwiseMax(-1.0f).cwiseMin(1.0f);
}

UpdateInfo Td3Agent::update(const EncodedBatch& batch) {
    ++updates_;
    UpdateInfo info;

    const Mat next_a = target_actions(batch.next_z_o);
    const Mat next_z_oa = rep_.encode_obs_action(batch.next_z_o, next_a);
    const Mat target_q = critic_min(critic1_target_, critic2_target_, next_z_oa);
    const float gamma = static_cast<float>(cfg_.gamma);
    const Mat y = static_cast<float>(cfg_.reward_scale) * batch.reward.array() + gamma * (1.0f - batch.done.array()) * target_q.array();
    info.critic_loss = update_critics(batch, y);

    if (updates_ % cfg_.policy_delay == 0) {
        actor_opt_.zero_grad();
        nn::Tape<float> tape;
        nn::Var<float> z_o = tape.constant(batch.z_o);
        nn::Var<float> a = actor_.forward(z_o);
        nn::Var<float> q = critic1_.forward(rep_.encode_obs_action(z_o, a), /*frozen=*/true);
        nn::Var<float> loss = nn::scale(nn::mean_all(q), -1.0f);
        info.actor_loss = loss.value()(0, 0);
        if (!std::isfinite(info.actor_loss))
            throw NumericError("td3: actor loss became non-finite at update " + std::to_string(updates_));
        tape.backward(loss);
        actor_opt_.step();
        info.actor_updated = true;

        std::vector<nn::Parameter<float>*> t, o;
        actor_target_.collect(t);
        actor_.collect(o);
        nn::soft_update(t, o, static_cast<float>(cfg_.tau));
        soft_update_critics();
    }
    return info;
}

// ---------------------------------------------------------------------------
// SAC

SacAgent::SacAgent(const AgentConfig& cfg, repr::Representation& rep, const env::EnvSpec& spec, std::uint64_t seed)
    : Agent(cfg, rep, spec, seed, 2 * spec.action_dim, nn::Activation::identity),
      target_entropy_(cfg.default_target_entropy ? -static_cast<double>(spec.action_dim) : cfg.target_entropy) {
    nn::AdamOptions o;
    o.learning_rate = cfg_.alpha_lr;
    alpha_opt_ = nn::Adam<float>({&log_alpha_}, o);
}

Mat SacAgent::standard_normal(Eigen::Index rows, Eigen::Index cols) {
    std::normal_distribution<float> n(0.0f, 1.0f);
    Mat m(rows, cols);
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = n(rng_);
    return m;
}

// Reparameterised tanh-Gaussian sample and its log-density.
SacAgent::Sample SacAgent::sample(nn::Tape<float>& tape, nn::Var<float> z_o, const Mat& noise, bool frozen) {
    const auto d = action_dim_;
    nn::Var<float> h = actor_.forward(z_o, frozen);
    nn::Var<float> mu = nn::slice_rows(h, 0, d);
    const float lo = static_cast<float>(cfg_.log_std_min), hi = static_cast<float>(cfg_.log_std_max);
    nn::Var<float> log_std = nn::add_scalar(nn::scale(nn::tanh(nn::slice_rows(h, d, d)), 0.5f * (hi - lo)), lo + 0.5f * (hi - lo));
    nn::Var<float> eps = tape.constant(noise);
    nn::Var<float> u = nn::add(mu, nn::mul(nn::exp(log_std), eps));
    nn::Var<float> action = nn::tanh(u);

    // log N(u; mu, std) = -eps^2/2 - log std - log(2 pi)/2, per dimension
    const float half_log_2pi = 0.5f * std::log(2.0f * std::numbers::pi_v<float>);
    const Mat gauss_const = (-0.5f * noise.array().square() - half_log_2pi).matrix().colwise().sum();
    nn::Var<float> log_prob = nn::add(nn::scale(nn::sum_rows(log_std), -1.0f), tape.constant(gauss_const));
    // tanh correction: log(1 - tanh(u)^2) = 2 (log 2 - u - softplus(-2u))
    nn::Var<float> correction =
        nn::scale(nn::add_scalar(nn::add(u, nn::softplus(nn::scale(u, -2.0f))), -std::log(2.0f)), -2.0f);
    log_prob = nn::sub(log_prob, nn::sum_rows(correction));
    return {action, log_prob};
}

Vec SacAgent::select_action(const Vec& z_o, bool explore) {
    if (z_o.size() != actor_.in_dim()) throw ShapeError("sac: z_o dimension mismatch");
    if (!explore) {
        const Mat h = actor_.forward(Mat(z_o));
        return scaler_.to_env(h.topRows(action_dim_).array().tanh().matrix().col(0));
    }
    nn::Tape<float> tape;
    Sample s = sample(tape, tape.constant(Mat(z_o)), standard_normal(action_dim_, 1), true);
    return scaler_.to_env(s.action.value().col(0));
}

Mat SacAgent::target_actions(const Mat& next_z_o) {
    nn::Tape<float> tape;
    return sample(tape, tape.constant(next_z_o), standard_normal(action_dim_, next_z_o.cols()), true).action.value();
}

UpdateInfo SacAgent::update(const EncodedBatch& batch) {
    ++updates_;
    UpdateInfo info;
    const float alpha_now = alpha();

    {
        nn::Tape<float> tape;
        Sample next = sample(tape, tape.constant(batch.next_z_o), standard_normal(action_dim_, batch.next_z_o.cols()), true);
        const Mat next_z_oa = rep_.encode_obs_action(batch.next_z_o, next.action.value());
        const Mat soft_q =
            critic_min(critic1_target_, critic2_target_, next_z_oa).array() - alpha_now * next.log_prob.value().array();
        const float gamma = static_cast<float>(cfg_.gamma);
        const Mat y = static_cast<float>(cfg_.reward_scale) * batch.reward.array() + gamma * (1.0f - batch.done.array()) * soft_q.array();
        info.critic_loss = update_critics(batch, y);
    }

    Mat log_prob;
    {
        actor_opt_.zero_grad();
        nn::Tape<float> tape;
        nn::Var<float> z_o = tape.constant(batch.z_o);
        Sample s = sample(tape, z_o, standard_normal(action_dim_, batch.z_o.cols()), false);
        nn::Var<float> z_oa = rep_.encode_obs_action(z_o, s.action);
        nn::Var<float> q = nn::minimum(critic1_.forward(z_oa, true), critic2_.forward(z_oa, true));
        nn::Var<float> loss = nn::mean_all(nn::sub(nn::scale(s.log_prob, alpha_now), q));
        info.actor_loss = loss.value()(0, 0);
        if (!std::isfinite(info.actor_loss))
            throw NumericError("sac: actor loss became non-finite at update " + std::to_string(updates_));
        tape.backward(loss);
        actor_opt_.step();
        info.actor_updated = true;
        log_prob = s.log_prob.value();
    }

    if (cfg_.auto_alpha) {
        // d/d(log alpha) of mean(-log_alpha * (log_prob + target_entropy))
        alpha_opt_.zero_grad();
        log_alpha_.grad(0, 0) = -(log_prob.array() + static_cast<float>(target_entropy_)).mean();
        alpha_opt_.step();
    }

    soft_update_critics();
    info.alpha = alpha();
    return info;
}

std::unique_ptr<Agent> make_agent(const AgentConfig& cfg, repr::Representation& rep, const env::EnvSpec& spec,
                                  std::uint64_t seed) {
    if (cfg.algorithm == Algorithm::td3) return std::make_unique<Td3Agent>(cfg, rep, spec, seed);
    return std::make_unique<SacAgent>(cfg, rep, spec, seed);
}

}  // namespace auxrl::agents
