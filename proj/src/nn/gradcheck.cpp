#include "auxrl/nn/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace auxrl::nn {

double relative_error(double analytic, double numeric) {
    const double denom = std::max({std::abs(analytic), std::abs(numeric), 1e-8});
    return std::abs(analytic - numeric) / denom;
}

namespace {

struct Net {
    DenseNet<double> body;
    DenseLayer<double> head;

    double loss(const Matrix<double>& x, const Matrix<double>& y) const {
        const Matrix<double> p = head.forward(body.forward(x));
        return (p - y).array().square().mean();
    }
};

}  // namespace

GradcheckReport run_gradcheck(const GradcheckSpec& spec) {
    if (spec.in_dim < 1 || spec.blocks < 1 || spec.width < 1 || spec.out_dim < 1 || spec.batch < 1)
        throw ConfigError("gradcheck: dimensions must be positive");

    std::mt19937_64 rng(spec.seed);
    Net net{DenseNet<double>(spec.in_dim, spec.blocks, spec.width, spec.activation, "gc"),
            DenseLayer<double>(spec.in_dim + spec.blocks * spec.width, spec.out_dim, Activation::identity, "gc.head")};
    net.body.initialize(rng);
    net.head.initialize(rng, Init::fan_in);

    std::normal_distribution<double> normal(0.0, 1.0);
    Matrix<double> x(spec.in_dim, spec.batch), y(spec.out_dim, spec.batch);
    for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = normal(rng);
    for (Eigen::Index i = 0; i < y.size(); ++i) y.data()[i] = normal(rng);

    std::vector<Parameter<double>*> params;
    net.body.collect(params);
    net.head.collect(params);
    zero_grads(params);

    {
        Tape<double> tape;
        Var<double> in = tape.constant(x);
        Var<double> pred = net.head.forward(net.body.forward(in));
        tape.backward(mse(pred, tape.constant(y)));
    }
    if (spec.corrupt_gradient) {
        for (auto* p : params) p->grad *= 1.5;
    }

    Eigen::Index total = 0;
    for (auto* p : params) total += p->size();
    std::uniform_int_distribution<Eigen::Index> pick(0, total - 1);

    GradcheckReport report;
    for (int c = 0; c < spec.coordinates; ++c) {
        Eigen::Index flat = pick(rng);
        Parameter<double>* p = nullptr;
        for (auto* q : params) {
            if (flat < q->size()) {
                p = q;
                break;
            }
            flat -= q->size();
        }
        double& w = p->value.data()[flat];
        const double saved = w;
        w = saved + spec.step;
        const double up = net.loss(x, y);
        w = saved - spec.step;
        const double down = net.loss(x, y);
        w = saved;

        const double numeric = (up - down) / (2.0 * spec.step);
        const double err = relative_error(p->grad.data()[flat], numeric);
        ++report.coordinates_checked;
        if (err > spec.tolerance) ++report.failures;
        if (err > report.max_relative_error) {
            report.max_relative_error = err;
            report.worst_parameter = p->name;
        }
    }
    return report;
}

}  // namespace auxrl::nn
