#include <doctest.h>

#include <atomic>
#include <cmath>
#include <thread>

#include "lfppl/compile.hpp"
#include "lfppl/evaluator.hpp"
#include "lfppl/experiments.hpp"
#include "lfppl/rng.hpp"
#include "support/fixtures.hpp"

using namespace lfppl;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Independent density evaluation straight off the quadruple: find the
// active pair/triple with the strict interpreter and take logs of the
// linear-space smooth terms.
double direct_log_density(const Quadruple& q, const std::map<std::string, double>& env) {
    auto active = [&](const IndicatorProduct& p) {
        for (const auto& g : p.guards)
            if (!guard_holds(eval_sym(g.expr, env), g.rel)) return false;
        return true;
    };
    double logp = 0.0;
    for (const auto& p : q.density_pairs)
        if (active(p.eta)) {
            double k = eval_sym(p.k, env);
            logp += k > 0.0 ? std::log(k) : -kInf;
        }
    for (const auto& f : q.factor_triples)
        if (active(f.zeta)) {
            double l = eval_sym(f.l, env);
            logp += l > 0.0 ? std::log(l) : -kInf;
        }
    return logp;
}

// Random state in the box with every region boundary at least `margin`
// away, so central differences stay on one smooth piece.
State interior_state(const DensityEvaluator& ev, RandomStream& rng, double lo, double hi,
                     double margin) {
    for (int tries = 0; tries < 10000; ++tries) {
        std::vector<double> values(ev.index()->size());
        for (auto& v : values) v = rng.uniform(lo, hi);
        if (!std::isfinite(ev.log_density(values))) continue;
        bool clear = true;
        for (double b : ev.boundary_values(values))
            if (std::abs(b) <= margin) clear = false;
        if (clear) return State(ev.index(), values);
    }
    throw std::runtime_error("no interior state found");
}

void check_gradient_against_fd(const Quadruple& q, const std::vector<std::string>& wrt,
                               double lo, double hi, bool allow_discontinuous, uint64_t seed,
                               int states = 100) {
    DensityEvaluator ev(q);
    RandomStream rng(seed);
    for (int i = 0; i < states; ++i) {
        State s = interior_state(ev, rng, lo, hi, 1e-3);
        auto grad = ev.grad_log(s, wrt, allow_discontinuous);
        for (const auto& name : wrt) {
            const double h = 1e-6;
            State up = s;
            State down = s;
            up.set(name, s.at(name) + h);
            down.set(name, s.at(name) - h);
            double numeric = (ev.log_density(up.values()) - ev.log_density(down.values())) /
                             (2.0 * h);
            if (std::abs(numeric) > 1e-8) {
                CHECK(grad.at(name) ==
                      doctest::Approx(numeric).epsilon(1e-5));
            } else {
                CHECK(std::abs(grad.at(name) - numeric) < 1e-6);
            }
        }
    }
}

}  // namespace

TEST_SUITE_BEGIN("density");

TEST_CASE("fig1 log density values") {
    Quadruple q = fixtures::fig1(0.5, 1.0);
    DensityEvaluator ev(q);

    // inside the support, true branch: log U(0.7;0,1) + log N(1;1,1)
    DensityReport r = ev.report(State::from_map(ev.index(), {{"z1", 0.7}}));
    CHECK(r.log_density == doctest::Approx(std::log(1.0 / std::sqrt(2.0 * M_PI))).epsilon(1e-10));
    REQUIRE(r.branching.bits.size() == 1);
    CHECK(r.branching.bits[0] == true);

    // outside the uniform support the density is zero but indices report
    DensityReport out = ev.report(State::from_map(ev.index(), {{"z1", 1.5}}));
    CHECK(out.log_density == -kInf);
    CHECK(q.density_pairs[out.active_d].zero_density());

    // false branch picks the N(y;0,1) factor
    DensityReport low = ev.report(State::from_map(ev.index(), {{"z1", 0.3}}));
    CHECK(eval_sym(q.factor_triples[low.active_f].l, {{"z1", 0.3}}) ==
          doctest::Approx(0.24197072451914337));
    CHECK(low.branching.bits[0] == false);
    CHECK(low.log_density == doctest::Approx(std::log(0.24197072451914337)).epsilon(1e-10));
}

TEST_CASE("branching vector shapes") {
    CHECK(branching_vector(fixtures::fig1(), {{"z1", 0.7}}).bits == std::vector<bool>{true});
    CHECK(branching_vector(fixtures::fig1(), {{"z1", 0.3}}).bits == std::vector<bool>{false});

    Quadruple gmm = fixtures::gmm();
    DensityEvaluator ev(gmm);
    RandomStream rng(3);
    std::vector<double> values(ev.index()->size());
    for (auto& v : values) v = rng.uniform(0.0, 1.0);
    CHECK(ev.branching(values).bits.size() == 20);
}

TEST_CASE("different branching vectors mean different factor partitions") {
    Quadruple q = fixtures::fig1();
    DensityEvaluator ev(q);
    RandomStream rng(4);
    for (int i = 0; i < 200; ++i) {
        State a = State::from_map(ev.index(), {{"z1", rng.uniform(0.0, 1.0)}});
        State b = State::from_map(ev.index(), {{"z1", rng.uniform(0.0, 1.0)}});
        DensityReport ra = ev.report(a);
        DensityReport rb = ev.report(b);
        if (ra.branching != rb.branching) CHECK(ra.active_f != rb.active_f);
    }
}

TEST_CASE("exactly one partition is active at random in-support states") {
    struct Case {
        Quadruple q;
        double lo, hi;
    };
    for (auto& c : {Case{fixtures::fig1(), -0.5, 1.5}, Case{fixtures::twolevel(), -0.5, 2.5},
                    Case{fixtures::heavytail(3), -7.0, 7.0}}) {
        DensityEvaluator ev(c.q);
        RandomStream rng(11);
        for (int i = 0; i < 10000; ++i) {
            std::vector<double> values(ev.index()->size());
            for (auto& v : values) v = rng.uniform(c.lo, c.hi);
            CHECK_NOTHROW(ev.report(State(ev.index(), values)));  // asserts uniqueness
        }
    }
}

TEST_CASE("log density agrees with direct linear-space evaluation") {
    struct Case {
        Quadruple q;
        double lo, hi;
    };
    for (auto& c : {Case{fixtures::fig1(), 0.05, 0.95}, Case{fixtures::chained_normals(), -2, 2},
                    Case{fixtures::heavytail(4), -5.5, 5.5}}) {
        DensityEvaluator ev(c.q);
        RandomStream rng(12);
        for (int i = 0; i < 500; ++i) {
            std::map<std::string, double> env;
            std::vector<double> values(ev.index()->size());
            for (size_t v = 0; v < values.size(); ++v) {
                values[v] = rng.uniform(c.lo, c.hi);
                env[ev.index()->names()[v]] = values[v];
            }
            double expected = direct_log_density(c.q, env);
            double got = ev.log_density(values);
            if (std::isinf(expected)) {
                CHECK(std::isinf(got));
            } else {
                CHECK(got == doctest::Approx(expected).epsilon(1e-10));
            }
        }
    }
}

TEST_CASE("normal prior gradient") {
    // d/dz log N(z;0,2) = -z/4
    Quadruple q = compile_text("(sample (normal 0 2))", "prior");
    auto grad = grad_log_density(q, {{"z1", 1.0}}, {"z1"});
    CHECK(grad["z1"] == doctest::Approx(-0.25).epsilon(1e-12));
}

TEST_CASE("gmm gradient closed form when every draw picks cluster one") {
    Quadruple q = fixtures::gmm();
    DensityEvaluator ev(q);
    std::map<std::string, double> env;
    double m1 = -1.3;
    double m2 = 1.9;
    env["z1"] = m1;
    env["z2"] = m2;
    for (const auto& name : q.gamma) env[name] = 0.25;  // every u below 0.5

    auto grad = ev.grad_log(State::from_map(ev.index(), env), {"z1", "z2"});
    double expected_mu1 = -m1 / 4.0;
    for (double y : gmm_data()) expected_mu1 += y - m1;
    CHECK(grad["z1"] == doctest::Approx(expected_mu1).epsilon(1e-10));
    CHECK(grad["z2"] == doctest::Approx(-m2 / 4.0).epsilon(1e-10));
}

TEST_CASE("heavytail gradient is the unit radial direction") {
    Quadruple q = fixtures::heavytail(2);
    DensityEvaluator ev(q);
    auto grad = ev.grad_log(State::from_map(ev.index(), {{"z1", 1.0}, {"z2", 1.0}}),
                            {"z1", "z2"}, /*allow_discontinuous=*/true);
    CHECK(grad["z1"] == doctest::Approx(-1.0 / std::sqrt(2.0)).epsilon(1e-12));
    CHECK(grad["z2"] == doctest::Approx(-1.0 / std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("gradients match central differences on interior states") {
    check_gradient_against_fd(fixtures::chained_normals(), {"z1", "z2"}, -3.0, 3.0, false, 31);
    check_gradient_against_fd(fixtures::gmm(), {"z1", "z2"}, 0.0, 1.0, false, 32);
    check_gradient_against_fd(fixtures::heavytail(2), {"z1", "z2"}, -5.5, 5.5, true, 33);
}

TEST_CASE("gradient restrictions") {
    Quadruple q = fixtures::fig1();
    DensityEvaluator ev(q);
    State in_support = State::from_map(ev.index(), {{"z1", 0.7}});
    // z1 is discontinuity-marked
    CHECK_THROWS_AS(ev.grad_log(in_support, {"z1"}), eval_error);
    CHECK_NOTHROW(ev.grad_log(in_support, {"z1"}, /*allow_discontinuous=*/true));
    // zero-density states have no gradient
    State outside = State::from_map(ev.index(), {{"z1", 1.5}});
    CHECK_THROWS_AS(ev.grad_log(outside, {"z1"}, true), eval_error);
    CHECK_THROWS_AS(ev.grad_log(in_support, {"nope"}, true), eval_error);
}

TEST_CASE("state validation") {
    DensityEvaluator ev(fixtures::fig1());
    CHECK_THROWS_AS(State::from_map(ev.index(), {}), eval_error);
    CHECK_THROWS_AS(State::from_map(ev.index(), {{"wrong", 1.0}}), eval_error);
    CHECK_THROWS_AS(State::from_map(ev.index(), {{"z1", kInf}}), eval_error);
    CHECK_THROWS_AS(State::from_map(ev.index(), {{"z1", 0.5}, {"extra", 1.0}}), eval_error);
}

TEST_CASE("overlapping partitions are reported as a compiler bug") {
    // hand-built broken quadruple: two always-active pairs
    Quadruple broken;
    broken.delta = {"z1"};
    broken.sample_sites = {{"z1", "normal", {sym_lit(0.0), sym_lit(1.0)}}};
    SymPtr phi = sym_lit(0.5);
    broken.density_pairs = {{IndicatorProduct{}, phi}, {IndicatorProduct{}, phi}};
    broken.factor_triples = {{IndicatorProduct{}, sym_lit(1.0), sym_lit(0.0)}};
    DensityEvaluator ev(broken);
    CHECK_THROWS_WITH_AS(ev.report(State::from_map(ev.index(), {{"z1", 0.0}})),
                         doctest::Contains("two density partitions"), eval_error);
}

TEST_CASE("a shared evaluator gives identical answers from every thread") {
    Quadruple q = fixtures::gmm();
    DensityEvaluator ev(q);

    RandomStream rng(55);
    std::vector<std::vector<double>> states;
    std::vector<double> expected;
    for (int i = 0; i < 200; ++i) {
        std::vector<double> v(ev.index()->size());
        for (auto& x : v) x = rng.uniform(0.0, 1.0);
        states.push_back(v);
        expected.push_back(ev.log_density(states.back()));
    }

    std::vector<std::thread> pool;
    std::atomic<int> mismatches{0};
    for (int t = 0; t < 4; ++t) {
        pool.emplace_back([&] {
            for (size_t i = 0; i < states.size(); ++i)
                if (ev.log_density(states[i]) != expected[i]) ++mismatches;
        });
    }
    for (auto& t : pool) t.join();
    CHECK(mismatches == 0);
}

TEST_CASE("locality of factor dependence") {
    // moving a mean never flips a branch or changes the active partition
    Quadruple q = fixtures::gmm();
    DensityEvaluator ev(q);
    RandomStream rng(44);
    std::map<std::string, double> env;
    env["z1"] = -2.0;
    env["z2"] = 2.0;
    for (const auto& name : q.gamma) env[name] = rng.uniform(0.0, 1.0);
    DensityReport base = ev.report(State::from_map(ev.index(), env));
    for (double shift : {-1.5, -0.2, 0.4, 2.0}) {
        auto moved = env;
        moved["z1"] += shift;
        DensityReport r = ev.report(State::from_map(ev.index(), moved));
        CHECK(r.active_d == base.active_d);
        CHECK(r.active_f == base.active_f);
        CHECK(r.branching == base.branching);
    }
}

TEST_SUITE_END();
