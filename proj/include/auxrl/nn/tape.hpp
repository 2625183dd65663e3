#pragma once

// Reverse-mode differentiation over dense matrices.
//
// Values are laid out features x batch: every column is one sample. The tape
// records nodes in creation order, which is already a topological order, so
// backward() is a single reverse sweep. Gradients of parameter leaves are
// accumulated into the owning Parameter; constants never receive gradients and
// any subgraph depending only on constants is skipped during the sweep.

#include <cmath>
#include <cstddef>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "auxrl/errors.hpp"

namespace auxrl::nn {

template <typename T>
using Matrix = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;

template <typename T>
using Vector = Eigen::Matrix<T, Eigen::Dynamic, 1>;

template <typename T>
struct Parameter {
    std::string name;
    Matrix<T> value;
    Matrix<T> grad;

    Parameter() = default;
    Parameter(std::string n, Matrix<T> v)
        : name(std::move(n)), value(std::move(v)), grad(Matrix<T>::Zero(value.rows(), value.cols())) {}

    void zero_grad() { grad.setZero(value.rows(), value.cols()); }
    Eigen::Index size() const { return value.size(); }
};

template <typename T>
class Tape;

template <typename T>
struct Var {
    Tape<T>* tape = nullptr;
    std::size_t id = 0;

    const Matrix<T>& value() const { return tape->value(*this); }
    Eigen::Index rows() const { return value().rows(); }
    Eigen::Index cols() const { return value().cols(); }
};

template <typename T>
class Tape {
public:
    using Mat = Matrix<T>;
    using Backward = std::function<void(Tape&, std::size_t)>;

    Tape() { nodes_.reserve(64); }
    Tape(const Tape&) = delete;
    Tape& operator=(const Tape&) = delete;

    Var<T> constant(Mat value) { return push(std::move(value), false, nullptr, {}); }

    // Leaf bound to a trainable parameter. Its gradient lands in p.grad.
    Var<T> parameter(Parameter<T>& p) { return push(p.value, true, &p, {}); }

    Var<T> node(Mat value, bool needs_grad, Backward bw) { return push(std::move(value), needs_grad, nullptr, std::move(bw)); }

    const Mat& value(Var<T> v) const { return nodes_[v.id].value; }
    bool needs_grad(Var<T> v) const { return nodes_[v.id].needs_grad; }
    bool needs_grad(std::size_t id) const { return nodes_[id].needs_grad; }
    const Mat& value(std::size_t id) const { return nodes_[id].value; }

    // Gradient of the node, zero-initialised on first access.
    Mat& grad(std::size_t id) {
        Node& n = nodes_[id];
        if (n.grad.size() == 0) n.grad = Mat::Zero(n.value.rows(), n.value.cols());
        return n.grad;
    }
    const Mat& grad(Var<T> v) { return grad(v.id); }

    // Gradient of a scalar (1x1) loss w.r.t. every node that needs one;
    // parameter leaves accumulate into their Parameter::grad.
    void backward(Var<T> loss) {
        const Mat& l = value(loss);
        if (l.rows() != 1 || l.cols() != 1) throw ShapeError("backward: loss must be 1x1");
        if (!std::isfinite(static_cast<double>(l(0, 0)))) throw NumericError("backward: non-finite loss");
        grad(loss.id)(0, 0) = T(1);
        for (std::size_t i = loss.id + 1; i-- > 0;) {
            Node& n = nodes_[i];
            if (!n.needs_grad || n.grad.size() == 0) continue;
            if (n.param != nullptr) {
                n.param->grad += n.grad;
            } else if (n.backward) {
                n.backward(*this, i);
            }
        }
    }

    std::size_t size() const { return nodes_.size(); }

private:
    struct Node {
        Mat value;
        Mat grad;
        Backward backward;
        Parameter<T>* param = nullptr;
        bool needs_grad = false;
    };

    Var<T> push(Mat value, bool needs_grad, Parameter<T>* p, Backward bw) {
        nodes_.push_back(Node{std::move(value), Mat(), std::move(bw), p, needs_grad});
        return Var<T>{this, nodes_.size() - 1};
    }

    std::vector<Node> nodes_;
};

// ---------------------------------------------------------------------------
// Operations. Each computes its value eagerly and registers a closure that
// pushes the node gradient to its inputs.

namespace detail {
template <typename T>
void require_same(const Var<T>& a, const Var<T>& b, const char* op) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw ShapeError(std::string(op) + ": operand shapes differ (" + std::to_string(a.rows()) + "x" +
                         std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + "x" +
                         std::to_string(b.cols()) + ")");
}

template <typename T>
bool any_grad(const Var<T>& a) {
    return a.tape->needs_grad(a);
}
template <typename T>
bool any_grad(const Var<T>& a, const Var<T>& b) {
    return a.tape->needs_grad(a) || a.tape->needs_grad(b);
}

template <typename T>
T sigmoid(T x) {
    return x >= T(0) ? T(1) / (T(1) + std::exp(-x)) : std::exp(x) / (T(1) + std::exp(x));
}

template <typename T>
T softplus(T x) {
    return x > T(0) ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}
}  // namespace detail

template <typename T>
Var<T> matmul(Var<T> a, Var<T> b) {
    if (a.cols() != b.rows())
        throw ShapeError("matmul: inner dimensions differ (" + std::to_string(a.cols()) + " vs " +
                         std::to_string(b.rows()) + ")");
    Tape<T>& tp = *a.tape;
    Matrix<T> out = a.value() * b.value();
    const std::size_t ia = a.id, ib = b.id;
    return tp.node(std::move(out), detail::any_grad(a, b), [ia, ib](Tape<T>& t, std::size_t self) {
        const Matrix<T>& g = t.grad(self);
        if (t.needs_grad(ia)) t.grad(ia).noalias() += g * t.value(ib).transpose();
        if (t.needs_grad(ib)) t.grad(ib).noalias() += t.value(ia).transpose() * g;
    });
}

// x (m x n) plus column vector b (m x 1) broadcast over samples.
template <typename T>
Var<T> add_bias(Var<T> x, Var<T> b) {
    if (b.cols() != 1 || b.rows() != x.rows()) throw ShapeError("add_bias: bias must be rows(x) x 1");
    Tape<T>& tp = *x.tape;
    Matrix<T> out = x.value().colwise() + b.value().col(0);
    const std::size_t ix = x.id, ib = b.id;
    return tp.node(std::move(out), detail::any_grad(x, b), [ix, ib](Tape<T>& t, std::size_t self) {
        const Matrix<T>& g = t.grad(self);
        if (t.needs_grad(ix)) t.grad(ix) += g;
        if (t.needs_grad(ib)) t.grad(ib) += g.rowwise().sum();
    });
}

template <typename T>
Var<T> add(Var<T> a, Var<T> b) {
    detail::require_same(a, b, "add");
    Matrix<T> out = a.value() + b.value();
    const std::size_t ia = a.id, ib = b.id;
    return a.tape->node(std::move(out), detail::any_grad(a, b), [ia, ib](Tape<T>& t, std::size_t self) {
        const Matrix<T>& g = t.grad(self);
        if (t.needs_grad(ia)) t.grad(ia) += g;
        if (t.needs_grad(ib)) t.grad(ib) += g;
    });
}

template <typename T>
Var<T> sub(Var<T> a, Var<T> b) {
    detail::require_same(a, b, "sub");
    Matrix<T> out = a.value() - b.value();
    const std::size_t ia = a.id, ib = b.id;
    return a.tape->node(std::move(out), detail::any_grad(a, b), [ia, ib](Tape<T>& t, std::size_t self) {
        const Matrix<T>& g = t.grad(self);
        if (t.needs_grad(ia)) t.grad(ia) += g;
        if (t.needs_grad(ib)) t.grad(ib) -= g;
    });
}

// Elementwise product.
template <typename T>
Var<T> mul(Var<T> a, Var<T> b) {
    detail::require_same(a, b, "mul");
    Matrix<T> out = a.value().cwiseProduct(b.value());
    const std::size_t ia = a.id, ib = b.id;
    return a.tape->node(std::move(out), detail::any_grad(a, b), [ia, ib](Tape<T>& t, std::size_t self) {
        const Matrix<T>& g = t.grad(self);
        if (t.needs_grad(ia)) t.grad(ia) += g.cwiseProduct(t.value(ib));
        if (t.needs_grad(ib)) t.grad(ib) += g.cwiseProduct(t.value(ia));
    });
}

// Elementwise minimum; the gradient goes to the smaller operand (ties to a).
template <typename T>
Var<T> minimum(Var<T> a, Var<T> b) {
    detail::require_same(a, b, "minimum");
    Matrix<T> out = a.value().cwiseMin(b.value());
    const std::size_t ia = a.id, ib = b.id;
    return a.tape->node(std::move(out), detail::any_grad(a, b), [ia, ib](Tape<T>& t, std::size_t self) {
        const Matrix<T>& g = t.grad(self);
        const auto pick_a = (t.value(ia).array() <= t.value(ib).array());
        if (t.needs_grad(ia)) t.grad(ia).array() += pick_a.select(g.array(), T(0));
        if (t.needs_grad(ib)) t.grad(ib).array() += pick_a.select(T(0), g.array());
    });
}

template <typename T>
Var<T> scale(Var<T> a, T c) {
    Matrix<T> out = a.value() * c;
    const std::size_t ia = a.id;
    return a.tape->node(std::move(out), detail::any_grad(a), [ia, c](Tape<T>& t, std::size_t self) {
        t.grad(ia) += t.grad(self) * c;
    });
}

template <typename T>
Var<T> add_scalar(Var<T> a, T c) {
    Matrix<T> out = a.value().array() + c;
    const std::size_t ia = a.id;
    return a.tape->node(std::move(out), detail::any_grad(a), [ia](Tape<T>& t, std::size_t self) {
        t.grad(ia) += t.grad(self);
    });
}

template <typename T>
Var<T> square(Var<T> a) {
    Matrix<T> out = a.value().array().square();
    const std::size_t ia = a.id;
    return a.tape->node(std::move(out), detail::any_grad(a), [ia](Tape<T>& t, std::size_t self) {
        t.grad(ia).array() += T(2) * t.grad(self).array() * t.value(ia).array();
    });
}

template <typename T>
Var<T> relu(Var<T> a) {
    Matrix<T> out = a.value().cwiseMax(T(0));
    const std::size_t ia = a.id;
    return a.tape->node(std::move(out), detail::any_grad(a), [ia](Tape<T>& t, std::size_t self) {
        t.grad(ia).array() += (t.value(ia).array() > T(0)).select(t.grad(self).array(), T(0));
    });
}

template <typename T>
Var<T> tanh(Var<T> a) {
    Matrix<T> out = a.value().array().tanh();
    const std::size_t ia = a.id;
    return a.tape->node(std::move(out), detail::any_grad(a), [ia](Tape<T>& t, std::size_t self) {
        const auto y = t.value(self).array();
        t.grad(ia).array() += t.grad(self).array() * (T(1) - y * y);
    });
}

// x * sigmoid(x)
template <typename T>
Var<T> swish(Var<T> a) {
    Matrix<T> out = a.value().unaryExpr([](T x) { return x * detail::sigmoid(x); });
    const std::size_t ia = a.id;
    return a.tape->node(std::move(out), detail::any_grad(a), [ia](Tape<T>& t, std::size_t self) {
        const Matrix<T> d = t.value(ia).unaryExpr([](T x) {
            const T s = detail::sigmoid(x);
            return s + x * s * (T(1) - s);
        });
        t.grad(ia).array() += t.grad(self).array() * d.array();
    });
}

template <typename T>
Var<T> exp(Var<T> a) {
    Matrix<T> out = a.value().array().exp();
    const std::size_t ia = a.id;
    return a.tape->node(std::move(out), detail::any_grad(a), [ia](Tape<T>& t, std::size_t self) {
        t.grad(ia).array() += t.grad(self).array() * t.value(self).array();
    });
}

// log(1 + exp(x)), evaluated without overflow.
template <typename T>
Var<T> softplus(Var<T> a) {
    Matrix<T> out = a.value().unaryExpr([](T x) { return detail::softplus(x); });
    const std::size_t ia = a.id;
    return a.tape->node(std::move(out), detail::any_grad(a), [ia](Tape<T>& t, std::size_t self) {
        const Matrix<T> d = t.value(ia).unaryExpr([](T x) { return detail::sigmoid(x); });
        t.grad(ia).array() += t.grad(self).array() * d.array();
    });
}

// Stack a on top of b (feature concatenation).
template <typename T>
Var<T> concat_rows(Var<T> a, Var<T> b) {
    if (a.cols() != b.cols()) throw ShapeError("concat_rows: batch sizes differ");
    const Eigen::Index ra = a.rows(), rb = b.rows();
    Matrix<T> out(ra + rb, a.cols());
    out.topRows(ra) = a.value();
    out.bottomRows(rb) = b.value();
    const std::size_t ia = a.id, ib = b.id;
    return a.tape->node(std::move(out), detail::any_grad(a, b), [ia, ib, ra, rb](Tape<T>& t, std::size_t self) {
        const Matrix<T>& g = t.grad(self);
        if (t.needs_grad(ia)) t.grad(ia) += g.topRows(ra);
        if (t.needs_grad(ib)) t.grad(ib) += g.bottomRows(rb);
    });
}

template <typename T>
Var<T> slice_rows(Var<T> a, Eigen::Index start, Eigen::Index count) {
    if (start < 0 || count < 0 || start + count > a.rows()) throw ShapeError("slice_rows: range out of bounds");
    Matrix<T> out = a.value().middleRows(start, count);
    const std::size_t ia = a.id;
    return a.tape->node(std::move(out), detail::any_grad(a), [ia, start, count](Tape<T>& t, std::size_t self) {
        t.grad(ia).middleRows(start, count) += t.grad(self);
    });
}

// Column sums: (m x n) -> (1 x n). Used to reduce per-dimension terms per sample.
template <typename T>
Var<T> sum_rows(Var<T> a) {
    Matrix<T> out = a.value().colwise().sum();
    const std::size_t ia = a.id;
    return a.tape->node(std::move(out), detail::any_grad(a), [ia](Tape<T>& t, std::size_t self) {
        t.grad(ia).rowwise() += t.grad(self).row(0);
    });
}

template <typename T>
Var<T> mean_all(Var<T> a) {
    const auto n = static_cast<T>(a.value().size());
    Matrix<T> out(1, 1);
    out(0, 0) = a.value().sum() / n;
    const std::size_t ia = a.id;
    return a.tape->node(std::move(out), detail::any_grad(a), [ia, n](Tape<T>& t, std::size_t self) {
        t.grad(ia).array() += t.grad(self)(0, 0) / n;
    });
}

template <typename T>
Var<T> sum_all(Var<T> a) {
    Matrix<T> out(1, 1);
    out(0, 0) = a.value().sum();
    const std::size_t ia = a.id;
    return a.tape->node(std::move(out), detail::any_grad(a), [ia](Tape<T>& t, std::size_t self) {
        t.grad(ia).array() += t.grad(self)(0, 0);
    });
}

// Mean over all elements of (prediction - target)^2.
template <typename T>
Var<T> mse(Var<T> prediction, Var<T> target) {
    return mean_all(square(sub(prediction, target)));
}

}  // namespace auxrl::nn
