#include "auxrl/repr/ofenet.hpp"

#include <cmath>
#include <memory>

#include "auxrl/errors.hpp"

namespace auxrl::repr {

Mat IdentityRepresentation::encode_obs(const Mat& obs) const {
    if (obs.rows() != obs_dim_) throw ShapeError("identity representation: observation dimension mismatch");
    return obs;
}

Mat IdentityRepresentation::encode_obs_action(const Mat& z_o, const Mat& action) const {
    if (z_o.rows() != obs_dim_ || action.rows() != action_dim_ || z_o.cols() != action.cols())
        throw ShapeError("identity representation: (z_o, a) shape mismatch");
    Mat out(obs_dim_ + action_dim_, z_o.cols());
    out << z_o, action;
    return out;
}

nn::Var<float> IdentityRepresentation::encode_obs_action(nn::Var<float> z_o, nn::Var<float> action) {
    if (z_o.rows() != obs_dim_ || action.rows() != action_dim_)
        throw ShapeError("identity representation: (z_o, a) shape mismatch");
    return nn::concat_rows(z_o, action);
}

std::string_view to_string(AuxTask t) {
    switch (t) {
        case AuxTask::rwp: return "rwp";
        case AuxTask::fsp: return "fsp";
        case AuxTask::fsdp: return "fsdp";
    }
    return "fsp";
}

AuxTask aux_task_from_string(std::string_view s) {
    if (s == "rwp") return AuxTask::rwp;
    if (s == "fsp") return AuxTask::fsp;
    if (s == "fsdp") return AuxTask::fsdp;
    throw ConfigError("unknown auxiliary task '" + std::string(s) + "' (expected rwp, fsp or fsdp)");
}

Eigen::Index target_dim(AuxTask task, Eigen::Index obs_dim) { return task == AuxTask::rwp ? 1 : obs_dim; }

void RepresentationConfig::validate() const {
    if (layers_per_part < 1) throw ConfigError("representation.layers_per_part must be >= 1");
    if (width < 1) throw ConfigError("representation.width must be >= 1");
    if (pretrain_steps < 0) throw ConfigError("representation.pretrain_steps must be >= 0");
    if (!(learning_rate > 0.0)) throw ConfigError("representation.learning_rate must be > 0");
    if (batch_size < 1) throw ConfigError("representation.batch_size must be >= 1");
}

RepresentationDims representation_dims(Eigen::Index obs_dim, Eigen::Index action_dim, int layers_per_part, int width) {
    if (obs_dim < 1 || action_dim < 1 || layers_per_part < 1 || width < 1)
        throw ConfigError("representation dimensions need positive obs_dim, action_dim, layers and width");
    const Eigen::Index growth = static_cast<Eigen::Index>(layers_per_part) * width;
    const Eigen::Index z_o = obs_dim + growth;
    return {z_o, z_o + action_dim + growth};
}

Vec aux_target(AuxTask task, const Transition& t) {
    switch (task) {
        case AuxTask::rwp: return Vec::Constant(1, t.reward);
        case AuxTask::fsp: return t.next_obs;
        case AuxTask::fsdp: return t.next_obs - t.obs;
    }
    return {};
}

Mat aux_targets(AuxTask task, const Batch& batch) {
    switch (task) {
        case AuxTask::rwp: return batch.reward;
        case AuxTask::fsp: return batch.next_obs;
        case AuxTask::fsdp: return batch.next_obs - batch.obs;
    }
    return {};
}

TargetNormalizer TargetNormalizer::identity(Eigen::Index dim) { return {Vec::Zero(dim), Vec::Ones(dim)}; }

TargetNormalizer TargetNormalizer::fit(const Mat& targets) {
    if (targets.cols() == 0) return identity(targets.rows());
    // accumulate in double so long pretraining sets do not lose precision
    const Eigen::MatrixXd t = targets.cast<double>();
    const Eigen::VectorXd mean = t.rowwise().mean();
    const Eigen::VectorXd var = (t.colwise() - mean).array().square().rowwise().mean();
    TargetNormalizer n{mean.cast<float>(), Vec(targets.rows())};
    for (Eigen::Index i = 0; i < var.size(); ++i) {
        const double sd = std::sqrt(var(i));
        n.stddev(i) = sd < kMinRewardStddev ? 1.0f : static_cast<float>(sd);
    }
    return n;
}

Mat TargetNormalizer::apply(const Mat& targets) const {
    return ((targets.colwise() - mean).array().colwise() / stddev.array()).matrix();
}

Mat TargetNormalizer::invert(const Mat& standardized) const {
    return ((standardized.array().colwise() * stddev.array()).matrix().colwise() + mean);
}

void check_reward_signal(AuxTask task, const std::vector<Transition>& data) {
    if (task != AuxTask::rwp || data.size() < 2) return;
    double mean = 0.0;
    for (const auto& t : data) mean += t.reward;
    mean /= static_cast<double>(data.size());
    double var = 0.0;
    for (const auto& t : data) var += (t.reward - mean) * (t.reward - mean);
    const double sd = std::sqrt(var / static_cast<double>(data.size()));
    if (sd < kMinRewardStddev)
        throw DegenerateRewardError("reward prediction needs a varying reward: pretraining reward stddev is " +
                                    std::to_string(sd) + " over " + std::to_string(data.size()) +
                                    " transitions; representations would decouple from observation and action");
}

OfeNet::OfeNet(Eigen::Index obs_dim, Eigen::Index action_dim, const RepresentationConfig& cfg, std::uint64_t seed)
    : obs_dim_(obs_dim),
      action_dim_(action_dim),
      cfg_(cfg),
      normalizer_(TargetNormalizer::identity(target_dim(cfg.task, obs_dim))) {
    cfg_.validate();
    if (obs_dim < 1 || action_dim < 1) throw ConfigError("OfeNet: observation and action dims must be positive");
    part1_ = nn::DenseNet<float>(obs_dim, cfg.layers_per_part, cfg.width, cfg.activation, "ofe.obs");
    part2_ = nn::DenseNet<float>(part1_.out_dim() + action_dim, cfg.layers_per_part, cfg.width, cfg.activation,
                                 "ofe.obs_action");
    head_ = nn::DenseLayer<float>(part2_.out_dim(), target_dim(cfg.task, obs_dim), nn::Activation::identity, "ofe.head");

    std::mt19937_64 rng(seed);
    part1_.initialize(rng);
    part2_.initialize(rng);
    head_.initialize(rng, nn::Init::fan_in);

    nn::AdamOptions opts;
    opts.learning_rate = cfg.learning_rate;
    optimizer_ = nn::Adam<float>(parameters(), opts);
}

std::vector<nn::Parameter<float>*> OfeNet::parameters() {
    std::vector<nn::Parameter<float>*> out;
    part1_.collect(out);
    part2_.collect(out);
    head_.collect(out);
    return out;
}

std::vector<const nn::Parameter<float>*> OfeNet::parameters() const {
    std::vector<const nn::Parameter<float>*> out;
    part1_.collect(out);
    part2_.collect(out);
    head_.collect(out);
    return out;
}

std::uint64_t OfeNet::checksum() const { return nn::checksum(parameters()); }

Mat OfeNet::encode_obs(const Mat& obs) const {
    if (obs.rows() != obs_dim_)
        throw ShapeError("OfeNet: expected observation dim " + std::to_string(obs_dim_) + ", got " +
                         std::to_string(obs.rows()));
    return part1_.forward(obs);
}

Mat OfeNet::encode_obs_action(const Mat& z_o, const Mat& action) const {
    if (z_o.rows() != obs_feature_dim() || action.rows() != action_dim_ || z_o.cols() != action.cols())
        throw ShapeError("OfeNet: (z_o, a) shape mismatch");
    Mat in(z_o.rows() + action.rows(), z_o.cols());
    in << z_o, action;
    return part2_.forward(in);
}

nn::Var<float> OfeNet::encode_obs_action(nn::Var<float> z_o, nn::Var<float> action) {
    if (z_o.rows() != obs_feature_dim() || action.rows() != action_dim_) throw ShapeError("OfeNet: (z_o, a) shape mismatch");
    return part2_.forward(nn::concat_rows(z_o, action), /*frozen=*/true);
}

Mat OfeNet::predict(const Mat& obs, const Mat& action) const {
    return normalizer_.invert(head_.forward(encode_obs_action(encode_obs(obs), action)));
}

float OfeNet::aux_train_step(const Batch& batch) {
    if (batch.size() == 0) throw InputError("aux_train_step: empty batch");
    if (batch.obs.rows() != obs_dim_ || batch.action.rows() != action_dim_)
        throw ShapeError("aux_train_step: batch shapes do not match the network");

    const Mat target = normalizer_.apply(aux_targets(cfg_.task, batch));
    optimizer_.zero_grad();
    nn::Tape<float> tape;
    nn::Var<float> z_o = part1_.forward(tape.constant(batch.obs));
    nn::Var<float> z_oa = part2_.forward(nn::concat_rows(z_o, tape.constant(batch.action)));
    nn::Var<float> loss = nn::mse(head_.forward(z_oa), tape.constant(target));
    const float value = loss.value()(0, 0);
    if (!std::isfinite(value))
        throw NumericError("auxiliary " + std::string(to_string(cfg_.task)) + " loss became non-finite after " +
                           std::to_string(optimizer_.step_count()) + " updates");
    tape.backward(loss);
    optimizer_.step();
    return value;
}

void OfeNet::pretrain_on(const agents::ReplayBuffer& buffer, int updates, std::mt19937_64& rng) {
    if (updates < 0) throw ConfigError("pretrain: update count must be >= 0");
    if (buffer.empty()) return;
    check_reward_signal(cfg_.task, buffer.items());
    std::vector<std::size_t> all(buffer.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    normalizer_ = TargetNormalizer::fit(aux_targets(cfg_.task, buffer.gather(all)));
    for (int i = 0; i < updates; ++i)
        aux_train_step(buffer.gather(buffer.sample_indices(static_cast<std::size_t>(cfg_.batch_size), rng)));
}

void OfeNet::set_normalizer(TargetNormalizer n) {
    const Eigen::Index d = target_dim(cfg_.task, obs_dim_);
    if (n.mean.size() != d || n.stddev.size() != d) throw ShapeError("OfeNet: normalizer dimension mismatch");
    normalizer_ = std::move(n);
}

io::Checkpoint OfeNet::to_checkpoint() const {
    io::Checkpoint ck;
    ck.meta = {{"kind", "ofenet"},
               {"obs_dim", obs_dim_},
               {"action_dim", action_dim_},
               {"layers_per_part", cfg_.layers_per_part},
               {"width", cfg_.width},
               {"task", std::string(to_string(cfg_.task))},
               {"pretrain_steps", cfg_.pretrain_steps},
               {"learning_rate", cfg_.learning_rate},
               {"batch_size", cfg_.batch_size},
               {"activation", std::string(nn::to_string(cfg_.activation))}};
    for (const auto* p : parameters()) ck.add(p->name, p->value);
    ck.add("normalizer.mean", normalizer_.mean);
    ck.add("normalizer.stddev", normalizer_.stddev);
    return ck;
}

std::unique_ptr<OfeNet> OfeNet::from_checkpoint(const io::Checkpoint& ck) {
    if (ck.meta.value("kind", "") != "ofenet") throw InputError("checkpoint does not hold an OfeNet");
    RepresentationConfig cfg;
    cfg.layers_per_part = ck.meta.at("layers_per_part").get<int>();
    cfg.width = ck.meta.at("width").get<int>();
    cfg.task = aux_task_from_string(ck.meta.at("task").get<std::string>());
    cfg.pretrain_steps = ck.meta.at("pretrain_steps").get<int>();
    cfg.learning_rate = ck.meta.at("learning_rate").get<double>();
    cfg.batch_size = ck.meta.at("batch_size").get<int>();
    cfg.activation = nn::activation_from_string(ck.meta.at("activation").get<std::string>());
    auto net = std::make_unique<OfeNet>(ck.meta.at("obs_dim").get<Eigen::Index>(),
                                        ck.meta.at("action_dim").get<Eigen::Index>(), cfg, 0);
    for (auto* p : net->parameters()) {
        const Mat& v = ck.get(p->name);
        if (v.rows() != p->value.rows() || v.cols() != p->value.cols())
            throw ShapeError("checkpoint array '" + p->name + "' has the wrong shape");
        p->value = v;
    }
    net->set_normalizer({ck.get("normalizer.mean"), ck.get("normalizer.stddev")});
    return net;
}

}  // namespace auxrl::repr
