#include <cmath>
#include <functional>
#include <random>

#include "doctest.h"

#include "auxrl/nn/adam.hpp"
#include "auxrl/nn/gradcheck.hpp"
#include "auxrl/nn/layers.hpp"

using namespace auxrl;
using namespace auxrl::nn;

namespace {

Matrix<double> random_matrix(Eigen::Index r, Eigen::Index c, std::mt19937_64& rng) {
    std::normal_distribution<double> n(0.0, 1.0);
    Matrix<double> m(r, c);
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = n(rng);
    return m;
}

// Central-difference check of d(sum(weights .* f(x)))/dx for a unary tape op.
double op_max_rel_error(const std::function<Var<double>(Var<double>)>& op, Matrix<double> x,
                        const std::function<Matrix<double>(const Matrix<double>&)>& reference) {
    std::mt19937_64 rng(7);
    const Matrix<double> w = random_matrix(reference(x).rows(), reference(x).cols(), rng);
    Tape<double> tape;
    Parameter<double> px("x", x);
    Var<double> in = tape.parameter(px);
    tape.backward(sum_all(mul(op(in), tape.constant(w))));

    double worst = 0.0;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        Matrix<double> up = x, down = x;
        up.data()[i] += 1e-5;
        down.data()[i] -= 1e-5;
        const double numeric =
            ((reference(up).cwiseProduct(w)).sum() - (reference(down).cwiseProduct(w)).sum()) / 2e-5;
        worst = std::max(worst, relative_error(px.grad.data()[i], numeric));
    }
    return worst;
}

}  // namespace

TEST_CASE("dense forward: identity and relu examples") {
    DenseLayer<double> id(2, 2, Activation::identity);
    id.weight().value = Matrix<double>::Identity(2, 2);
    Matrix<double> x(2, 1);
    x << 1, 2;
    CHECK(id.forward(x) == x);

    DenseLayer<double> r(2, 2, Activation::relu);
    r.weight().value = Matrix<double>::Identity(2, 2);
    r.bias().value << -3, 0;
    const Matrix<double> y = r.forward(x);
    CHECK(y(0, 0) == 0.0);
    CHECK(y(1, 0) == 2.0);
}

TEST_CASE("dense forward matches a naive triple loop") {
    std::mt19937_64 rng(11);
    DenseLayer<double> layer(3, 4, Activation::identity);
    layer.initialize(rng, Init::fan_in);
    layer.bias().value = random_matrix(4, 1, rng);
    const Matrix<double> x = random_matrix(3, 5, rng);
    const Matrix<double> y = layer.forward(x);
    for (int s = 0; s < 5; ++s) {
        for (int o = 0; o < 4; ++o) {
            double acc = layer.bias().value(o, 0);
            for (int i = 0; i < 3; ++i) acc += layer.weight().value(o, i) * x(i, s);
            CHECK(std::abs(y(o, s) - acc) < 1e-12);
        }
    }

    // tape path computes the same values
    Tape<double> tape;
    Var<double> out = layer.forward(tape.constant(x));
    CHECK((out.value() - y).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("dense forward rejects wrong input dimension") {
    DenseLayer<float> layer(3, 2, Activation::relu);
    CHECK_THROWS_AS(layer.forward(Matrix<float>::Zero(4, 1)), ShapeError);
    Tape<float> tape;
    CHECK_THROWS_AS(layer.forward(tape.constant(Matrix<float>::Zero(2, 1))), ShapeError);
}

TEST_CASE("densenet block concatenates its input") {
    std::mt19937_64 rng(3);
    DenseNetBlock<double> block(3, 10, Activation::swish);
    block.layer().initialize(rng, Init::fan_in);
    const Matrix<double> x = random_matrix(3, 2, rng);
    const Matrix<double> y = block.forward(x);
    CHECK(y.rows() == 13);
    CHECK(y.topRows(3) == x);  // bit-identical prefix

    DenseNet<double> two(3, 2, 10, Activation::swish);
    CHECK(two.out_dim() == 23);
    CHECK(two.forward(x).rows() == 23);

    CHECK_THROWS_AS(block.forward(Matrix<double>::Zero(4, 1)), ShapeError);
}

TEST_CASE("zero-weight swish block appends swish(bias)") {
    DenseNetBlock<double> block(2, 3, Activation::swish);
    block.layer().bias().value << -1.0, 0.5, 2.0;
    Matrix<double> x(2, 1);
    x << 4.0, -7.0;
    const Matrix<double> y = block.forward(x);
    for (int i = 0; i < 3; ++i) {
        const double b = block.layer().bias().value(i, 0);
        CHECK(y(2 + i, 0) == doctest::Approx(b / (1.0 + std::exp(-b))).epsilon(1e-14));
    }
}

TEST_CASE("stacked blocks grow by L*W for any configuration") {
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<int> d(1, 40), l(1, 8), w(1, 40);
    for (int trial = 0; trial < 50; ++trial) {
        const int in = d(rng), blocks = l(rng), width = w(rng);
        DenseNet<float> net(in, blocks, width, Activation::swish);
        net.initialize(rng);
        Matrix<float> x = Matrix<float>::Random(in, 3);
        const Matrix<float> y = net.forward(x);
        CHECK(y.rows() == in + blocks * width);
        CHECK(y.topRows(in) == x);
    }
}

TEST_CASE("backprop: linear scalar case") {
    Tape<double> tape;
    Parameter<double> w("w", Matrix<double>::Constant(1, 1, 0.7));
    Var<double> x = tape.constant(Matrix<double>::Constant(1, 1, 2.0));
    tape.backward(sum_all(matmul(tape.parameter(w), x)));
    CHECK(w.grad(0, 0) == 2.0);
}

TEST_CASE("backprop: MSE at the optimum has zero gradient") {
    std::mt19937_64 rng(9);
    DenseLayer<double> layer(3, 2, Activation::identity);
    layer.initialize(rng, Init::fan_in);
    const Matrix<double> x = random_matrix(3, 6, rng);
    const Matrix<double> target = layer.forward(x);
    Tape<double> tape;
    tape.backward(mse(layer.forward(tape.constant(x)), tape.constant(target)));
    CHECK(layer.weight().grad.cwiseAbs().maxCoeff() == 0.0);
    CHECK(layer.bias().grad.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("backprop rejects non-finite and non-scalar losses") {
    Tape<double> tape;
    Var<double> nan = tape.constant(Matrix<double>::Constant(1, 1, std::nan("")));
    CHECK_THROWS_AS(tape.backward(nan), NumericError);
    Var<double> v = tape.constant(Matrix<double>::Zero(2, 1));
    CHECK_THROWS_AS(tape.backward(v), ShapeError);
}

TEST_CASE("frozen layers pass gradient to their input only") {
    std::mt19937_64 rng(1);
    DenseLayer<double> layer(2, 2, Activation::tanh);
    layer.initialize(rng, Init::fan_in);
    Parameter<double> x("x", random_matrix(2, 3, rng));
    Tape<double> tape;
    tape.backward(sum_all(layer.forward(tape.parameter(x), /*frozen=*/true)));
    CHECK(layer.weight().grad.cwiseAbs().maxCoeff() == 0.0);
    CHECK(x.grad.cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("random 2-block DenseNet gradient matches finite differences") {
    GradcheckSpec spec;
    spec.blocks = 2;
    spec.coordinates = 150;
    spec.seed = 123;
    const auto report = run_gradcheck(spec);
    CHECK(report.coordinates_checked == 150);
    CHECK(report.max_relative_error < 1e-4);
    CHECK(report.passed());
}

TEST_CASE("gradcheck property over random configurations") {
    std::mt19937_64 rng(2024);
    std::uniform_int_distribution<int> blocks(1, 4), width(1, 32), in(1, 12);
    for (int trial = 0; trial < 12; ++trial) {
        GradcheckSpec spec;
        spec.in_dim = in(rng);
        spec.blocks = blocks(rng);
        spec.width = width(rng);
        spec.activation = trial % 2 == 0 ? Activation::swish : Activation::tanh;
        spec.seed = rng();
        const auto report = run_gradcheck(spec);
        INFO("trial " << trial << " worst " << report.worst_parameter);
        CHECK(report.max_relative_error < 1e-4);
    }
}

TEST_CASE("gradcheck negative control fails on a corrupted gradient") {
    GradcheckSpec spec;
    spec.corrupt_gradient = true;
    CHECK_FALSE(run_gradcheck(spec).passed());
}

TEST_CASE("individual tape ops match finite differences") {
    std::mt19937_64 rng(42);
    const Matrix<double> x = random_matrix(3, 4, rng);
    const Matrix<double> other = random_matrix(3, 4, rng);

    CHECK(op_max_rel_error([](Var<double> v) { return swish(v); }, x,
                           [](const Matrix<double>& m) { return activate(m, Activation::swish); }) < 1e-6);
    CHECK(op_max_rel_error([](Var<double> v) { return nn::tanh(v); }, x,
                           [](const Matrix<double>& m) { return Matrix<double>(m.array().tanh()); }) < 1e-6);
    CHECK(op_max_rel_error([](Var<double> v) { return nn::exp(v); }, x,
                           [](const Matrix<double>& m) { return Matrix<double>(m.array().exp()); }) < 1e-6);
    CHECK(op_max_rel_error([](Var<double> v) { return softplus(v); }, x,
                           [](const Matrix<double>& m) {
                               return Matrix<double>(m.array().exp().log1p());
                           }) < 1e-6);
    CHECK(op_max_rel_error([](Var<double> v) { return square(v); }, x,
                           [](const Matrix<double>& m) { return Matrix<double>(m.array().square()); }) < 1e-6);
    CHECK(op_max_rel_error(
              [&](Var<double> v) { return minimum(v, v.tape->constant(other)); }, x,
              [&](const Matrix<double>& m) { return Matrix<double>(m.cwiseMin(other)); }) < 1e-6);
    CHECK(op_max_rel_error(
              [](Var<double> v) { return slice_rows(concat_rows(v, scale(v, 2.0)), 2, 3); }, x,
              [](const Matrix<double>& m) {
                  Matrix<double> c(6, m.cols());
                  c << m, 2.0 * m;
                  return Matrix<double>(c.middleRows(2, 3));
              }) < 1e-6);
    CHECK(op_max_rel_error([](Var<double> v) { return sum_rows(add_scalar(v, 1.0)); }, x,
                           [](const Matrix<double>& m) {
                               return Matrix<double>((m.array() + 1.0).matrix().colwise().sum());
                           }) < 1e-6);
}

TEST_CASE("forward and backward are deterministic") {
    GradcheckSpec spec;
    spec.seed = 77;
    const auto a = run_gradcheck(spec);
    const auto b = run_gradcheck(spec);
    CHECK(a.max_relative_error == b.max_relative_error);
}

TEST_CASE("adam: zero gradient leaves parameters unchanged") {
    Parameter<float> p("p", Matrix<float>::Constant(2, 2, 0.3f));
    Adam<float> opt({&p}, {});
    p.zero_grad();
    for (int i = 0; i < 5; ++i) opt.step();
    CHECK(p.value == Matrix<float>::Constant(2, 2, 0.3f));
    CHECK(opt.step_count() == 5);
}

TEST_CASE("adam: first step with unit gradient moves by the learning rate") {
    Parameter<double> p("p", Matrix<double>::Constant(1, 1, 1.0));
    AdamOptions o;
    o.learning_rate = 0.001;
    Adam<double> opt({&p}, o);
    p.grad(0, 0) = 1.0;
    opt.step();
    // m_hat = v_hat = 1 after bias correction: delta = lr / (1 + eps)
    CHECK(p.value(0, 0) == doctest::Approx(1.0 - 0.001 / (1.0 + 1e-8)).epsilon(1e-12));
}

TEST_CASE("adam: constant gradient descends") {
    Parameter<float> p("p", Matrix<float>::Zero(1, 3));
    Adam<float> opt({&p}, {});
    for (int i = 0; i < 100; ++i) {
        p.grad << 2.0f, -0.5f, 0.0f;
        opt.step();
    }
    CHECK(p.value(0, 0) < 0.0f);
    CHECK(p.value(0, 1) > 0.0f);
    CHECK(p.value(0, 2) == 0.0f);
}

TEST_CASE("adam: shape mismatch and non-finite gradients are rejected") {
    Parameter<float> p("p", Matrix<float>::Zero(2, 2));
    Adam<float> opt({&p}, {});
    p.grad = Matrix<float>::Zero(3, 1);
    CHECK_THROWS_AS(opt.step(), ShapeError);
    p.grad = Matrix<float>::Constant(2, 2, std::nanf(""));
    CHECK_THROWS_AS(opt.step(), NumericError);
}

TEST_CASE("soft update with tau = 1 copies online parameters") {
    Parameter<float> online("o", Matrix<float>::Constant(2, 1, 4.0f)), target("t", Matrix<float>::Zero(2, 1));
    soft_update<float>({&target}, {&online}, 1.0f);
    CHECK(target.value == online.value);
    soft_update<float>({&target}, {&online}, 0.5f);
    CHECK(target.value == online.value);
}
