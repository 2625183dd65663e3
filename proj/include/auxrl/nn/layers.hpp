#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "auxrl/nn/tape.hpp"

namespace auxrl::nn {

enum class Activation { identity, relu, swish, tanh };

inline std::string_view to_string(Activation a) {
    switch (a) {
        case Activation::identity: return "identity";
        case Activation::relu: return "relu";
        case Activation::swish: return "swish";
        case Activation::tanh: return "tanh";
    }
    return "identity";
}

inline Activation activation_from_string(std::string_view s) {
    if (s == "identity") return Activation::identity;
    if (s == "relu") return Activation::relu;
    if (s == "swish") return Activation::swish;
    if (s == "tanh") return Activation::tanh;
    throw ConfigError("unknown activation '" + std::string(s) + "'");
}

enum class Init {
    fan_in,  // U(-sqrt(6/fan_in), +sqrt(6/fan_in)), zero bias
    small,   // U(-3e-3, 3e-3) for weights and bias; used on output layers
};

template <typename T>
Matrix<T> activate(const Matrix<T>& z, Activation act) {
    switch (act) {
        case Activation::identity: return z;
        case Activation::relu: return z.cwiseMax(T(0));
        case Activation::swish: return z.unaryExpr([](T x) { return x * detail::sigmoid(x); });
        case Activation::tanh: return z.array().tanh().matrix();
    }
    return z;
}

template <typename T>
Var<T> activate(Var<T> z, Activation act) {
    switch (act) {
        case Activation::identity: return z;
        case Activation::relu: return relu(z);
        case Activation::swish: return swish(z);
        case Activation::tanh: return nn::tanh(z);
    }
    return z;
}

// activation(W x + b) for a single fully connected layer.
template <typename T>
class DenseLayer {
public:
    DenseLayer() = default;
    DenseLayer(Eigen::Index in_dim, Eigen::Index out_dim, Activation act, std::string name = "dense")
        : weight_(name + ".weight", Matrix<T>::Zero(out_dim, in_dim)),
          bias_(name + ".bias", Matrix<T>::Zero(out_dim, 1)),
          act_(act) {
        if (in_dim < 1 || out_dim < 1) throw ShapeError("DenseLayer: dimensions must be positive");
    }

    template <typename Rng>
    void initialize(Rng& rng, Init scheme) {
        const double bound = scheme == Init::fan_in ? std::sqrt(6.0 / static_cast<double>(in_dim())) : 3e-3;
        std::uniform_real_distribution<double> u(-bound, bound);
        for (Eigen::Index i = 0; i < weight_.value.size(); ++i) weight_.value.data()[i] = static_cast<T>(u(rng));
        for (Eigen::Index i = 0; i < bias_.value.size(); ++i)
            bias_.value.data()[i] = scheme == Init::small ? static_cast<T>(u(rng)) : T(0);
    }

    Eigen::Index in_dim() const { return weight_.value.cols(); }
    Eigen::Index out_dim() const { return weight_.value.rows(); }
    Activation activation() const { return act_; }

    // Batched forward without recording; x is in_dim x batch.
    Matrix<T> forward(const Matrix<T>& x) const {
        check_input(x.rows());
        Matrix<T> z = weight_.value * x;
        z.colwise() += bias_.value.col(0);
        return activate(z, act_);
    }

    // Recorded forward. A frozen layer contributes constants, so gradients pass
    // through to x but nothing accumulates in the layer parameters.
    Var<T> forward(Var<T> x, bool frozen = false) {
        check_input(x.rows());
        Tape<T>& tape = *x.tape;
        Var<T> w = frozen ? tape.constant(weight_.value) : tape.parameter(weight_);
        Var<T> b = frozen ? tape.constant(bias_.value) : tape.parameter(bias_);
        return activate(add_bias(matmul(w, x), b), act_);
    }

    Parameter<T>& weight() { return weight_; }
    Parameter<T>& bias() { return bias_; }
    const Parameter<T>& weight() const { return weight_; }
    const Parameter<T>& bias() const { return bias_; }

    void collect(std::vector<Parameter<T>*>& out) {
        out.push_back(&weight_);
        out.push_back(&bias_);
    }
    void collect(std::vector<const Parameter<T>*>& out) const {
        out.push_back(&weight_);
        out.push_back(&bias_);
    }

private:
    void check_input(Eigen::Index rows) const {
        if (rows != in_dim())
            throw ShapeError("dense layer '" + weight_.name + "': expected input dim " + std::to_string(in_dim()) +
                             ", got " + std::to_string(rows));
    }

    Parameter<T> weight_;
    Parameter<T> bias_;
    Activation act_ = Activation::identity;
};

// Output is [input; activation(layer(input))], so every block widens by W.
template <typename T>
class DenseNetBlock {
public:
    DenseNetBlock() = default;
    DenseNetBlock(Eigen::Index in_dim, Eigen::Index width, Activation act, std::string name = "block")
        : layer_(in_dim, width, act, std::move(name)) {}

    Eigen::Index in_dim() const { return layer_.in_dim(); }
    Eigen::Index width() const { return layer_.out_dim(); }
    Eigen::Index out_dim() const { return in_dim() + width(); }

    Matrix<T> forward(const Matrix<T>& x) const {
        Matrix<T> h = layer_.forward(x);
        Matrix<T> out(out_dim(), x.cols());
        out.topRows(in_dim()) = x;
        out.bottomRows(width()) = h;
        return out;
    }

    Var<T> forward(Var<T> x, bool frozen = false) { return concat_rows(x, layer_.forward(x, frozen)); }

    DenseLayer<T>& layer() { return layer_; }
    const DenseLayer<T>& layer() const { return layer_; }

private:
    DenseLayer<T> layer_;
};

// A stack of DenseNet blocks of equal width.
template <typename T>
class DenseNet {
public:
    DenseNet() = default;
    DenseNet(Eigen::Index in_dim, int blocks, Eigen::Index width, Activation act, const std::string& name = "densenet")
        : in_dim_(in_dim) {
        if (blocks < 1) throw ConfigError("DenseNet: need at least one block");
        if (width < 1) throw ConfigError("DenseNet: width must be positive");
        Eigen::Index d = in_dim;
        for (int i = 0; i < blocks; ++i) {
            blocks_.emplace_back(d, width, act, name + "." + std::to_string(i));
            d += width;
        }
    }

    template <typename Rng>
    void initialize(Rng& rng) {
        for (auto& b : blocks_) b.layer().initialize(rng, Init::fan_in);
    }

    Eigen::Index in_dim() const { return in_dim_; }
    Eigen::Index out_dim() const { return blocks_.empty() ? in_dim_ : blocks_.back().out_dim(); }
    std::size_t num_blocks() const { return blocks_.size(); }

    Matrix<T> forward(const Matrix<T>& x) const {
        Matrix<T> h = x;
        for (const auto& b : blocks_) h = b.forward(h);
        return h;
    }

    Var<T> forward(Var<T> x, bool frozen = false) {
        for (auto& b : blocks_) x = b.forward(x, frozen);
        return x;
    }

    std::vector<DenseNetBlock<T>>& blocks() { return blocks_; }
    const std::vector<DenseNetBlock<T>>& blocks() const { return blocks_; }

    void collect(std::vector<Parameter<T>*>& out) {
        for (auto& b : blocks_) b.layer().collect(out);
    }
    void collect(std::vector<const Parameter<T>*>& out) const {
        for (const auto& b : blocks_) b.layer().collect(out);
    }

private:
    Eigen::Index in_dim_ = 0;
    std::vector<DenseNetBlock<T>> blocks_;
};

// Plain feed-forward stack: hidden layers share one activation, the output
// layer has its own and is initialised small.
template <typename T>
class Mlp {
public:
    Mlp() = default;
    Mlp(Eigen::Index in_dim, const std::vector<Eigen::Index>& hidden, Eigen::Index out_dim, Activation hidden_act,
        Activation out_act, const std::string& name = "mlp") {
        Eigen::Index d = in_dim;
        for (std::size_t i = 0; i < hidden.size(); ++i) {
            layers_.emplace_back(d, hidden[i], hidden_act, name + "." + std::to_string(i));
            d = hidden[i];
        }
        layers_.emplace_back(d, out_dim, out_act, name + ".out");
    }

    template <typename Rng>
    void initialize(Rng& rng) {
        for (std::size_t i = 0; i < layers_.size(); ++i)
            layers_[i].initialize(rng, i + 1 == layers_.size() ? Init::small : Init::fan_in);
    }

    Eigen::Index in_dim() const { return layers_.front().in_dim(); }
    Eigen::Index out_dim() const { return layers_.back().out_dim(); }

    Matrix<T> forward(const Matrix<T>& x) const {
        Matrix<T> h = layers_.front().forward(x);
        for (std::size_t i = 1; i < layers_.size(); ++i) h = layers_[i].forward(h);
        return h;
    }

    Var<T> forward(Var<T> x, bool frozen = false) {
        for (auto& l : layers_) x = l.forward(x, frozen);
        return x;
    }

    std::vector<DenseLayer<T>>& layers() { return layers_; }
    const std::vector<DenseLayer<T>>& layers() const { return layers_; }

    void collect(std::vector<Parameter<T>*>& out) {
        for (auto& l : layers_) l.collect(out);
    }
    void collect(std::vector<const Parameter<T>*>& out) const {
        for (const auto& l : layers_) l.collect(out);
    }

private:
    std::vector<DenseLayer<T>> layers_;
};

// Order-sensitive FNV-1a over the raw bytes of every parameter; used to prove
// that a set of parameters was left untouched.
template <typename T>
std::uint64_t checksum(const std::vector<const Parameter<T>*>& params) {
    std::uint64_t h = 1469598103934665603ull;
    for (const auto* p : params) {
        const auto* bytes = reinterpret_cast<const unsigned char*>(p->value.data());
        const std::size_t n = static_cast<std::size_t>(p->value.size()) * sizeof(T);
        for (std::size_t i = 0; i < n; ++i) {
            h ^= bytes[i];
            h *= 1099511628211ull;
        }
    }
    return h;
}

template <typename T>
void zero_grads(const std::vector<Parameter<T>*>& params) {
    for (auto* p : params) p->zero_grad();
}

// Polyak averaging: target <- tau * online + (1 - tau) * target.
template <typename T>
void soft_update(const std::vector<Parameter<T>*>& target, const std::vector<Parameter<T>*>& online, T tau) {
    if (target.size() != online.size()) throw ShapeError("soft_update: parameter lists differ in length");
    for (std::size_t i = 0; i < target.size(); ++i) {
        if (tau == T(1))
            target[i]->value = online[i]->value;
        else
            target[i]->value = tau * online[i]->value + (T(1) - tau) * target[i]->value;
    }
}

}  // namespace auxrl::nn
