#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "auxrl/nn/tape.hpp"

namespace auxrl::nn {

struct AdamOptions {
    double learning_rate = 3e-4;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

// Adam with bias correction. Moment buffers mirror the parameter list handed
// to the constructor; the list order is part of the optimizer state.
template <typename T>
class Adam {
public:
    Adam() = default;
    Adam(std::vector<Parameter<T>*> params, AdamOptions opts) : params_(std::move(params)), opts_(opts) {
        for (auto* p : params_) {
            m_.push_back(Matrix<T>::Zero(p->value.rows(), p->value.cols()));
            v_.push_back(Matrix<T>::Zero(p->value.rows(), p->value.cols()));
        }
    }

    void zero_grad() {
        for (auto* p : params_) p->zero_grad();
    }

    // Applies one update from the gradients currently stored in the parameters.
    void step() {
        ++step_count_;
        const double bc1 = 1.0 - std::pow(opts_.beta1, static_cast<double>(step_count_));
        const double bc2 = 1.0 - std::pow(opts_.beta2, static_cast<double>(step_count_));
        const T b1 = static_cast<T>(opts_.beta1), b2 = static_cast<T>(opts_.beta2);
        const T lr = static_cast<T>(opts_.learning_rate / bc1);
        const T inv_sqrt_bc2 = static_cast<T>(1.0 / std::sqrt(bc2));
        const T eps = static_cast<T>(opts_.epsilon);
        for (std::size_t i = 0; i < params_.size(); ++i) {
            Parameter<T>& p = *params_[i];
            if (p.grad.rows() != p.value.rows() || p.grad.cols() != p.value.cols())
                throw ShapeError("adam: gradient shape differs from parameter '" + p.name + "'");
            if (!p.grad.allFinite()) throw NumericError("adam: non-finite gradient in '" + p.name + "'");
            m_[i] = b1 * m_[i] + (T(1) - b1) * p.grad;
            v_[i] = b2 * v_[i] + (T(1) - b2) * p.grad.cwiseAbs2();
            p.value.array() -= lr * m_[i].array() / (v_[i].array().sqrt() * inv_sqrt_bc2 + eps);
            if (!p.value.allFinite()) throw NumericError("adam: parameter '" + p.name + "' became non-finite");
        }
    }

    std::int64_t step_count() const { return step_count_; }
    const AdamOptions& options() const { return opts_; }
    const std::vector<Matrix<T>>& first_moment() const { return m_; }
    const std::vector<Matrix<T>>& second_moment() const { return v_; }
    std::vector<Matrix<T>>& first_moment() { return m_; }
    std::vector<Matrix<T>>& second_moment() { return v_; }
    void set_step_count(std::int64_t n) { step_count_ = n; }

private:
    std::vector<Parameter<T>*> params_;
    AdamOptions opts_;
    std::vector<Matrix<T>> m_;
    std::vector<Matrix<T>> v_;
    std::int64_t step_count_ = 0;
};

}  // namespace auxrl::nn
