#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"

#include "auxrl/env/linear_chain.hpp"
#include "auxrl/env/pendulum.hpp"
#include "auxrl/env/puck_slide.hpp"
#include "auxrl/errors.hpp"

using namespace auxrl;
using namespace auxrl::env;

namespace {

Vec random_action(const EnvSpec& s, std::mt19937_64& rng) {
    std::uniform_real_distribution<float> u(-1.0f, 1.0f);
    Vec a(s.action_dim);
    for (Eigen::Index i = 0; i < a.size(); ++i)
        a(i) = s.action_low(i) + (u(rng) + 1.0f) * 0.5f * (s.action_high(i) - s.action_low(i));
    return a;
}

std::vector<Vec> rollout(Environment& env, std::uint64_t seed, int steps) {
    std::mt19937_64 rng(seed + 100);
    std::vector<Vec> obs = {env.reset(seed)};
    for (int i = 0; i < steps; ++i) obs.push_back(env.step(random_action(env.spec(), rng)).observation);
    return obs;
}

}  // namespace

TEST_CASE("same seed gives identical trajectories") {
    Pendulum p1, p2;
    PuckSlide s1, s2;
    LinearChain c1, c2;
    CHECK(rollout(p1, 5, 150) == rollout(p2, 5, 150));
    CHECK(rollout(s1, 5, 100) == rollout(s2, 5, 100));
    CHECK(rollout(c1, 5, 150) == rollout(c2, 5, 150));
    CHECK(rollout(p1, 5, 10) != rollout(p2, 6, 10));
}

TEST_CASE("pendulum spec and observation") {
    Pendulum p;
    CHECK(p.spec().obs_dim == 3);
    CHECK(p.spec().action_dim == 1);
    const Vec o = p.reset(1);
    CHECK(o.size() == 3);
    CHECK(o(0) * o(0) + o(1) * o(1) == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(std::abs(o(2)) <= 1.0f);
}

TEST_CASE("pendulum upright at rest with zero torque has zero reward") {
    Pendulum p;
    p.reset(0);
    p.set_state({0.0, 0.0});
    const StepResult r = p.step(Vec::Zero(1));
    CHECK(r.reward == 0.0);
    CHECK(p.state().theta == 0.0);
}

TEST_CASE("pendulum step matches the reference update") {
    Pendulum p;
    p.reset(0);
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> th(-3.0, 3.0), thd(-7.0, 7.0), u(-2.5, 2.5);
    for (int i = 0; i < 200; ++i) {
        const PendulumState s{th(rng), thd(rng)};
        const double torque = u(rng);
        p.set_state(s);
        const StepResult r = p.step(Vec::Constant(1, static_cast<float>(torque)));
        // independent re-derivation of the classic-control update
        const double uc = std::clamp(static_cast<double>(static_cast<float>(torque)), -2.0, 2.0);
        double an = std::fmod(s.theta + std::numbers::pi, 2 * std::numbers::pi);
        if (an < 0) an += 2 * std::numbers::pi;
        an -= std::numbers::pi;
        const double cost = an * an + 0.1 * s.theta_dot * s.theta_dot + 0.001 * uc * uc;
        double nthd = s.theta_dot + (3 * 10.0 / 2 * std::sin(s.theta) + 3.0 * uc) * 0.05;
        nthd = std::clamp(nthd, -8.0, 8.0);
        CHECK(r.reward == doctest::Approx(-cost).epsilon(1e-9));
        CHECK(p.state().theta_dot == doctest::Approx(nthd).epsilon(1e-9));
        CHECK(std::cos(p.state().theta) == doctest::Approx(std::cos(s.theta + nthd * 0.05)).epsilon(1e-9));
        CHECK(r.reward <= 0.0);
    }
}

TEST_CASE("pendulum energy stays bounded under zero torque") {
    // The semi-implicit step has an oscillating, non-secular energy error:
    // the second half of a long rollout strays no further than the first.
    Pendulum p;
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> th(-3.1, 3.1), thd(-3.0, 3.0);
    double worst_step = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        p.reset(0);
        // librating states only: below the upright energy the speed clip never engages
        PendulumState s0{th(rng), thd(rng)};
        while (Pendulum::energy(s0) > 27.0) s0 = {th(rng), thd(rng)};
        p.set_state(s0);
        const double e0 = Pendulum::energy(p.state());
        double first_half = 0.0, second_half = 0.0;
        for (int t = 0; t < 4000; ++t) {
            const double before = Pendulum::energy(p.state());
            p.step(Vec::Zero(1));
            const double after = Pendulum::energy(p.state());
            REQUIRE(std::abs(p.state().theta_dot) < 8.0);
            worst_step = std::max(worst_step, std::abs(after - before) / before);
            double& half = t < 2000 ? first_half : second_half;
            half = std::max(half, std::abs(after - e0) / e0);
        }
        CHECK(first_half < 0.25);
        CHECK(second_half <= first_half * 1.05 + 1e-3);
    }
    CHECK(worst_step < 0.04);
}

TEST_CASE("pendulum rejects bad actions and clips torque") {
    Pendulum p;
    p.reset(0);
    CHECK_THROWS_AS(p.step(Vec::Zero(2)), ShapeError);
    CHECK_THROWS_AS(p.step(Vec::Constant(1, std::numeric_limits<float>::quiet_NaN())), InputError);
    Pendulum a, b;
    a.reset(4);
    b.reset(4);
    CHECK(a.step(Vec::Constant(1, 50.0f)).observation == b.step(Vec::Constant(1, 2.0f)).observation);
}

TEST_CASE("episodes end exactly at the horizon") {
    Pendulum p;
    PuckSlide s;
    LinearChain c;
    for (Environment* e : std::initializer_list<Environment*>{&p, &s, &c}) {
        e->reset(1);
        std::mt19937_64 rng(1);
        const int h = e->spec().max_episode_steps;
        for (int t = 1; t <= h; ++t) {
            const StepResult r = e->step(random_action(e->spec(), rng));
            CHECK(r.done == (t == h));
            CHECK_FALSE(r.terminal);
        }
    }
}

TEST_CASE("puck-slide goal is out of reach over 1000 seeds") {
    PuckSlide s;
    for (std::uint64_t seed = 0; seed < 1000; ++seed) {
        const Vec o = s.reset(seed);
        const auto& st = s.state();
        CHECK(st.goal.norm() > s.params().reach_radius);
        CHECK(st.goal.norm() >= s.params().goal_min_radius);
        CHECK(st.goal.norm() <= s.params().goal_max_radius);
        CHECK((st.goal - st.actuator).norm() > s.params().reach_radius);
        CHECK(o.size() == 12);
    }
}

TEST_CASE("puck-slide compute_reward and success") {
    PuckSlide s;
    const Vec zero = Vec::Zero(2);
    Vec d(2);
    d << 3.0f, 4.0f;
    CHECK(s.compute_reward(zero, d) == -5.0);
    CHECK(s.compute_reward(d, d) == 0.0);
    CHECK(s.success(d, d));
    Vec edge(2);
    edge << static_cast<float>(s.params().success_threshold), 0.0f;
    CHECK(s.success(edge, zero) == (static_cast<double>(edge(0)) < s.params().success_threshold));
    Vec inside(2);
    inside << 0.049f, 0.0f;
    CHECK(s.success(inside, zero));

    Pendulum p;
    CHECK_THROWS_AS(p.compute_reward(zero, zero), UnsupportedOperation);
    CHECK_THROWS_AS(p.success(zero, zero), UnsupportedOperation);
}

TEST_CASE("puck-slide success threshold boundary is strict") {
    PuckSlideParams params;
    params.success_threshold = 0.5;  // exactly representable
    PuckSlide s(params);
    Vec a(2), b(2);
    a << 0.0f, 0.0f;
    b << 0.5f, 0.0f;
    CHECK_FALSE(s.success(a, b));
    b << 0.4999f, 0.0f;
    CHECK(s.success(a, b));
}

TEST_CASE("puck-slide step reward equals compute_reward every step") {
    PuckSlide s;
    std::mt19937_64 rng(9);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        s.reset(seed);
        for (int t = 0; t < 100; ++t) {
            const StepResult r = s.step(random_action(s.spec(), rng));
            const Vec ag = achieved_goal_of(s.spec(), r.observation);
            const Vec dg = desired_goal_of(s.spec(), r.observation);
            CHECK(r.reward == s.compute_reward(ag, dg));
            CHECK(r.success == s.success(ag, dg));
            const double dist = (ag.cast<double>() - dg.cast<double>()).norm();
            CHECK(r.success == (dist < s.params().success_threshold));
            CHECK(r.observation.allFinite());
        }
    }
}

TEST_CASE("puck-slide reward is constant until contact") {
    PuckSlide s;
    s.reset(3);
    Vec away(2);
    const Eigen::Vector2d dir = -s.state().puck.normalized();
    away << static_cast<float>(dir.x()), static_cast<float>(dir.y());
    const double r0 = s.step(away).reward;
    for (int t = 0; t < 50; ++t) CHECK(s.step(away).reward == r0);
}

TEST_CASE("puck-slide puck slows monotonically once struck") {
    PuckSlide s;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        s.reset(seed);
        const Eigen::Vector2d to_puck = s.state().puck.normalized();
        Vec push(2);
        push << static_cast<float>(to_puck.x()), static_cast<float>(to_puck.y());
        int t = 0;
        while (s.state().puck_velocity.norm() == 0.0 && t < 40) {
            s.step(push);
            ++t;
        }
        REQUIRE(s.state().puck_velocity.norm() > 0.0);
        // retreat so the actuator cannot touch the puck again
        Vec back = -push;
        double prev = s.state().puck_velocity.norm();
        for (int k = 0; k < 40; ++k) {
            s.step(back);
            const double v = s.state().puck_velocity.norm();
            CHECK(v <= prev + 1e-12);
            prev = v;
        }
    }
}

TEST_CASE("puck-slide strike moves the puck far enough to reach goals") {
    PuckSlide s;
    s.reset(0);
    PuckSlideState st = s.state();
    st.actuator = {0.0, 0.0};
    st.puck = {0.2, 0.0};
    st.puck_velocity.setZero();
    s.set_state(st);
    Vec push(2);
    push << 1.0f, 0.0f;
    for (int t = 0; t < 99; ++t) s.step(t < 4 ? push : Vec(-push));
    CHECK(s.state().puck.x() > 0.8);
}

TEST_CASE("linear chain structure") {
    LinearChainParams params;
    params.state_dim = 32;
    params.action_dim = 8;
    LinearChain c(params);
    CHECK(c.spectral_radius() == doctest::Approx(0.99).epsilon(1e-9));
    CHECK(c.b_matrix().rows() == 32);
    CHECK(c.b_matrix().cols() == 8);
    CHECK(c.actuated().size() == 8);
    CHECK(c.b_matrix().sum() == 8.0);

    params.noise_std = 0.0;
    LinearChain quiet(params);
    quiet.reset(1);
    Eigen::VectorXd x = Eigen::VectorXd::LinSpaced(32, -1.0, 1.0);
    quiet.set_state(x);
    Vec u = Vec::Zero(8);
    u(0) = 0.5f;
    const StepResult r = quiet.step(u);
    const Eigen::VectorXd expected = quiet.a_matrix() * x + quiet.b_matrix() * u.cast<double>();
    CHECK((quiet.state() - expected).norm() < 1e-12);
    CHECK(r.reward == doctest::Approx(-x.squaredNorm() - 0.1 * 0.25).epsilon(1e-12));

    params.decay = 1.1;
    CHECK_THROWS_AS(LinearChain{params}, ConfigError);
}

TEST_CASE("environment factory") {
    CHECK(make_environment({"pendulum", nlohmann::json::object()})->spec().obs_dim == 3);
    CHECK(make_environment({"puck_slide", nlohmann::json::object()})->spec().obs_dim == 12);
    auto chain = make_environment({"linear_chain", {{"state_dim", 16}}});
    CHECK(chain->spec().obs_dim == 16);
    CHECK(chain->spec().action_dim == 4);
    CHECK_THROWS_AS(make_environment({"", nlohmann::json::object()}), ConfigError);
    CHECK_THROWS_AS(make_environment({"hopper", nlohmann::json::object()}), ConfigError);
    CHECK_THROWS_AS(make_environment({"pendulum", {{"gravity", 9.8}}}), ConfigError);
    CHECK_THROWS_AS(make_environment({"linear_chain", {{"state_dim", "big"}}}), ConfigError);
}

TEST_CASE("observations stay finite under random bounded actions") {
    PuckSlide s;
    LinearChain c;
    Pendulum p;
    for (Environment* e : std::initializer_list<Environment*>{&p, &s, &c})
        for (const auto& o : rollout(*e, 17, 199)) CHECK(o.allFinite());
}
