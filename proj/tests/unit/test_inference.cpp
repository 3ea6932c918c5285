#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "lfppl/compile.hpp"
#include "lfppl/inference.hpp"
#include "support/fixtures.hpp"

using namespace lfppl;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

GradFn flat_grad = [](std::span<const double>, std::span<const int>, std::span<double> out) {
    for (auto& g : out) g = 0.0;
};

// standard normal target: dlogP/dx = -x
GradFn std_normal_grad = [](std::span<const double> x, std::span<const int> slots,
                            std::span<double> out) {
    for (size_t i = 0; i < slots.size(); ++i) out[i] = -x[static_cast<size_t>(slots[i])];
};

const std::vector<int> kSlot0{0};
const std::vector<double> kUnitMass{1.0};

double chain_mean(const ChainResult& chain, size_t col) {
    double sum = 0.0;
    for (const auto& row : chain.samples) sum += row[col];
    return sum / static_cast<double>(chain.samples.size());
}

// batch-means standard error for correlated chains
double batch_se(const std::vector<double>& series, size_t batches = 50) {
    size_t per = series.size() / batches;
    std::vector<double> means;
    for (size_t b = 0; b < batches; ++b) {
        double m = 0.0;
        for (size_t i = b * per; i < (b + 1) * per; ++i) m += series[i];
        means.push_back(m / static_cast<double>(per));
    }
    double grand = 0.0;
    for (double m : means) grand += m;
    grand /= static_cast<double>(batches);
    double var = 0.0;
    for (double m : means) var += (m - grand) * (m - grand);
    var /= static_cast<double>(batches - 1);
    return std::sqrt(var / static_cast<double>(batches));
}

}  // namespace

TEST_SUITE_BEGIN("inference");

TEST_CASE("half step one") {
    // flat potential: kick is a no-op, drift covers half a step
    std::vector<double> x{2.0};
    std::vector<double> p{1.5};
    half_step1(flat_grad, kSlot0, 0.2, x, p);
    CHECK(p[0] == 1.5);
    CHECK(x[0] == doctest::Approx(2.0 + 0.1 * 1.5));

    // standard normal at the mode: gradient zero
    x = {0.0};
    p = {1.0};
    half_step1(std_normal_grad, kSlot0, 0.2, x, p);
    CHECK(p[0] == doctest::Approx(1.0));
    CHECK(x[0] == doctest::Approx(0.1));

    // off the mode the kick fires first
    x = {1.0};
    p = {0.0};
    half_step1(std_normal_grad, kSlot0, 0.2, x, p);
    CHECK(p[0] == doctest::Approx(-0.1));
    CHECK(x[0] == doctest::Approx(1.0 - 0.01));
}

TEST_CASE("half step two") {
    std::vector<double> x{2.0};
    std::vector<double> p{1.5};
    half_step2(flat_grad, kSlot0, 0.2, x, p);
    CHECK(x[0] == doctest::Approx(2.0 + 0.1 * 1.5));
    CHECK(p[0] == 1.5);

    x = {0.0};
    p = {1.0};
    half_step2(std_normal_grad, kSlot0, 0.2, x, p);
    CHECK(x[0] == doctest::Approx(0.1));
    CHECK(p[0] == doctest::Approx(1.0 - 0.1 * 0.1));
}

TEST_CASE("half steps compose into one leapfrog step") {
    for (double x0 : {-1.3, 0.2, 2.4}) {
        for (double p0 : {-0.8, 0.5}) {
            const double eps = 0.17;
            std::vector<double> x{x0};
            std::vector<double> p{p0};
            half_step1(std_normal_grad, kSlot0, eps, x, p);
            // empty coordinate-wise sweep in between
            coordinatewise_sweep([](std::span<const double>) { return 0.0; }, {}, {}, {}, eps,
                                 x, p);
            half_step2(std_normal_grad, kSlot0, eps, x, p);

            // textbook kick-drift-kick
            double pe = p0 - 0.5 * eps * x0;
            double xe = x0 + eps * pe;
            pe -= 0.5 * eps * xe;
            CHECK(x[0] == doctest::Approx(xe).epsilon(1e-12));
            CHECK(p[0] == doctest::Approx(pe).epsilon(1e-12));
        }
    }
}

TEST_CASE("coordinate-wise sweep on a flat potential") {
    std::vector<double> x{0.0};
    std::vector<double> p{0.7};
    std::vector<size_t> perm{0};
    CoordinatewiseStats stats;
    coordinatewise_sweep([](std::span<const double>) { return 0.0; }, kSlot0, kUnitMass, perm,
                         0.1, x, p, &stats);
    CHECK(x[0] == doctest::Approx(0.1));
    CHECK(p[0] == doctest::Approx(0.7));
    CHECK(stats.accepted == 1);

    // negative momentum moves the other way
    x = {0.0};
    p = {-0.7};
    coordinatewise_sweep([](std::span<const double>) { return 0.0; }, kSlot0, kUnitMass, perm,
                         0.1, x, p);
    CHECK(x[0] == doctest::Approx(-0.1));
}

TEST_CASE("coordinate-wise sweep reflects off a zero-density wall") {
    auto wall = [](std::span<const double> v) { return v[0] > 1.0 ? kInf : 0.0; };
    std::vector<double> x{0.95};
    std::vector<double> p{0.4};
    std::vector<size_t> perm{0};
    CoordinatewiseStats stats;
    coordinatewise_sweep(wall, kSlot0, kUnitMass, perm, 0.2, x, p, &stats);
    CHECK(x[0] == doctest::Approx(0.95));
    CHECK(p[0] == doctest::Approx(-0.4));
    CHECK(stats.reflected == 1);
}

TEST_CASE("coordinate-wise sweep pays for an uphill move") {
    // two-level potential: 0 below 1, 0.5 at and above
    auto two_level = [](std::span<const double> v) { return v[0] < 1.0 ? 0.0 : 0.5; };
    std::vector<double> x{0.95};
    std::vector<double> p{1.0};
    std::vector<size_t> perm{0};
    coordinatewise_sweep(two_level, kSlot0, kUnitMass, perm, 0.1, x, p);
    CHECK(x[0] == doctest::Approx(1.05));
    CHECK(p[0] == doctest::Approx(0.5));

    // not enough kinetic energy: reflect instead
    x = {0.95};
    p = {0.3};
    coordinatewise_sweep(two_level, kSlot0, kUnitMass, perm, 0.1, x, p);
    CHECK(x[0] == doctest::Approx(0.95));
    CHECK(p[0] == doctest::Approx(-0.3));
}

TEST_CASE("coordinate moves have magnitude epsilon times mass exactly") {
    Model model(fixtures::twolevel());
    const auto& density = model.density();
    PotentialFn u = [&](std::span<const double> v) { return density.potential(v); };
    RandomStream rng(17);
    const double eps = 0.07;
    const double mass = 1.3;
    std::vector<double> masses{mass};
    for (int i = 0; i < 500; ++i) {
        std::vector<double> x{rng.uniform(0.05, 1.95)};
        std::vector<double> p{rng.laplace()};
        double before = x[0];
        std::vector<size_t> perm{0};
        coordinatewise_sweep(u, kSlot0, masses, perm, eps, x, p);
        double moved = std::abs(x[0] - before);
        bool ok = moved == 0.0 || moved == doctest::Approx(eps * mass).epsilon(1e-12);
        CHECK(ok);
    }
}

TEST_CASE("coordinate-wise sweeps conserve the hamiltonian") {
    for (auto& q : {fixtures::twolevel(), fixtures::heavytail(1)}) {
        Model model(q);
        const auto& density = model.density();
        PotentialFn u = [&](std::span<const double> v) { return density.potential(v); };
        RandomStream rng(18);
        std::vector<int> slots = model.all_slots();
        std::vector<double> masses(slots.size(), 1.0);
        long accepted = 0;
        long reflected = 0;
        for (int i = 0; i < 100; ++i) {
            std::vector<double> x(slots.size());
            std::vector<double> p(slots.size());
            for (auto& v : x) v = rng.uniform(0.05, 1.95);
            for (auto& v : p) v = rng.laplace();
            double h0 = u(x) + kinetic_energy(p, {}, slots, masses);
            CoordinatewiseStats stats;
            auto perm = rng.permutation(slots.size());
            coordinatewise_sweep(u, slots, masses, perm, 0.25, x, p, &stats);
            double h1 = u(x) + kinetic_energy(p, {}, slots, masses);
            CHECK(std::abs(h1 - h0) <= 1e-9);
            accepted += stats.accepted;
            reflected += stats.reflected;
        }
        CHECK(accepted > 0);
        CHECK(reflected > 0);
    }
}

TEST_CASE("composed trajectory is reversible") {
    for (auto& q : {fixtures::fig1(), fixtures::gmm(), fixtures::heavytail(3)}) {
        Model model(q);
        RandomStream rng(19);
        State start = model.initial_state(rng);
        std::vector<int> a = model.continuous_slots();
        std::vector<int> b = model.discontinuous_slots();
        std::vector<double> masses(b.size(), 1.0);

        std::vector<double> x = start.values();
        std::vector<double> p(x.size());
        for (int slot : a) p[static_cast<size_t>(slot)] = rng.gaussian();
        for (int slot : b) p[static_cast<size_t>(slot)] = rng.laplace();
        std::vector<double> x0 = x;
        std::vector<double> p0 = p;

        const int length = 10;
        std::vector<std::vector<size_t>> perms;
        for (int i = 0; i < length; ++i) perms.push_back(rng.permutation(b.size()));

        dhmc_trajectory(model, a, b, masses, 0.08, length, perms, x, p);

        for (auto& v : p) v = -v;
        std::vector<std::vector<size_t>> reversed(perms.rbegin(), perms.rend());
        for (auto& perm : reversed) std::reverse(perm.begin(), perm.end());
        dhmc_trajectory(model, a, b, masses, 0.08, length, reversed, x, p);

        for (size_t i = 0; i < x.size(); ++i) {
            CHECK(std::abs(x[i] - x0[i]) < 1e-8);
            CHECK(std::abs(-p[i] - p0[i]) < 1e-8);
        }
    }
}

TEST_CASE("dhmc reduces to hmc when gamma is empty") {
    Model model(fixtures::chained_normals());
    REQUIRE(model.discontinuous_slots().empty());

    SamplerConfig cfg;
    cfg.epsilon = 0.15;
    cfg.trajectory_length = 8;
    cfg.num_samples = 200;
    cfg.seed = 99;

    cfg.engine = Engine::Dhmc;
    ChainResult dhmc = run_chain(model, cfg);
    cfg.engine = Engine::Hmc;
    ChainResult hmc = run_chain(model, cfg);

    REQUIRE(dhmc.samples.size() == hmc.samples.size());
    for (size_t i = 0; i < dhmc.samples.size(); ++i)
        for (size_t v = 0; v < dhmc.samples[i].size(); ++v)
            CHECK(std::abs(dhmc.samples[i][v] - hmc.samples[i][v]) <= 1e-12);
}

TEST_CASE("leapfrog energy drift stays small on a smooth target") {
    Model model(fixtures::normal_model());
    RandomStream rng(20);
    std::vector<int> a = model.all_slots();
    for (int i = 0; i < 50; ++i) {
        std::vector<double> x{rng.uniform(-2.0, 2.0)};
        std::vector<double> p{rng.gaussian()};
        double h0 = model.density().potential(x) + kinetic_energy(p, a, {}, {});
        std::vector<std::vector<size_t>> perms(10);
        dhmc_trajectory(model, a, {}, {}, 0.1, 10, perms, x, p);
        double h1 = model.density().potential(x) + kinetic_energy(p, a, {}, {});
        CHECK(std::abs(h1 - h0) <= 0.1);
    }
}

TEST_CASE("standard normal through a factor matches its mean") {
    Model model(compile_text(
        "(let [x (sample (uniform -10 10))] (observe (factor (* -0.5 (* x x))) 0) x)",
        "stdnormal"));
    SamplerConfig cfg;
    cfg.engine = Engine::Hmc;
    cfg.epsilon = 0.3;
    cfg.trajectory_length = 8;
    cfg.num_samples = 10000;
    cfg.burn_in = 500;
    cfg.seed = 5;
    ChainResult chain = run_chain(model, cfg);
    std::vector<double> xs;
    for (const auto& row : chain.samples) xs.push_back(row[0]);
    double mean = chain_mean(chain, 0);
    CHECK(std::abs(mean) < 3.0 * batch_se(xs));
    CHECK(chain.stats.acceptance_rate() > 0.5);
}

TEST_CASE("zero retained samples still yields stats") {
    Model model(fixtures::normal_model());
    SamplerConfig cfg;
    cfg.num_samples = 0;
    cfg.burn_in = 5;
    cfg.seed = 1;
    ChainResult chain = run_chain(model, cfg);
    CHECK(chain.samples.empty());
    CHECK(chain.stats.steps == 5);
}

TEST_CASE("chains are deterministic given a seed") {
    Model model(fixtures::fig1());
    SamplerConfig cfg;
    cfg.num_samples = 200;
    cfg.seed = 123;
    ChainResult a = run_chain(model, cfg);
    ChainResult b = run_chain(model, cfg);
    REQUIRE(a.samples.size() == b.samples.size());
    for (size_t i = 0; i < a.samples.size(); ++i) CHECK(a.samples[i] == b.samples[i]);
}

TEST_CASE("near-zero step size accepts almost surely") {
    Model model(fixtures::gmm());
    SamplerConfig cfg;
    cfg.epsilon = 1e-5;
    cfg.trajectory_length = 5;
    cfg.num_samples = 200;
    cfg.seed = 6;
    ChainResult chain = run_chain(model, cfg);
    CHECK(chain.stats.acceptance_rate() >= 0.99);
}

TEST_CASE("initialization fails loudly on an impossible observation") {
    Model model(compile_text(
        "(let [x (sample (uniform 0 1))] (observe (uniform 0 0.5) 0.7) x)", "impossible"));
    RandomStream rng(7);
    CHECK_THROWS_AS(model.initial_state(rng), inference_error);
}

TEST_CASE("config validation") {
    SamplerConfig cfg;
    cfg.epsilon = 0.0;
    CHECK_THROWS_AS(cfg.validate(), inference_error);
    cfg.epsilon = 0.1;
    cfg.trajectory_length = 0;
    CHECK_THROWS_AS(cfg.validate(), inference_error);
}

TEST_SUITE_END();
