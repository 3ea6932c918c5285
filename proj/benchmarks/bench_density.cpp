#include <benchmark/benchmark.h>

#include "lfppl/compile.hpp"
#include "lfppl/experiments.hpp"
#include "lfppl/inference.hpp"

namespace {

using namespace lfppl;

const Model& gmm_model() {
    static Model model(compile_text(gmm_program_text(), "gmm"));
    return model;
}

const Model& heavytail_model() {
    static Model model(compile_text(heavytail_program_text(10), "heavytail"));
    return model;
}

std::vector<double> in_support_state(const Model& model, uint64_t seed) {
    RandomStream rng(seed);
    return model.initial_state(rng).values();
}

void BM_GmmPotential(benchmark::State& state) {
    const Model& model = gmm_model();
    std::vector<double> x = in_support_state(model, 1);
    for (auto _ : state) {
        double u = model.density().potential(x);
        benchmark::DoNotOptimize(u);
    }
}
BENCHMARK(BM_GmmPotential);

void BM_GmmGradient(benchmark::State& state) {
    const Model& model = gmm_model();
    std::vector<double> x = in_support_state(model, 2);
    std::vector<int> slots = model.continuous_slots();
    std::vector<double> grad(slots.size());
    for (auto _ : state) {
        model.density().grad_log(x, slots, grad);
        benchmark::DoNotOptimize(grad);
    }
}
BENCHMARK(BM_GmmGradient);

void BM_HeavytailPotential(benchmark::State& state) {
    const Model& model = heavytail_model();
    std::vector<double> x = in_support_state(model, 3);
    for (auto _ : state) {
        double u = model.density().potential(x);
        benchmark::DoNotOptimize(u);
    }
}
BENCHMARK(BM_HeavytailPotential);

void BM_GmmDhmcStep(benchmark::State& state) {
    const Model& model = gmm_model();
    RandomStream rng(4);
    State s = model.initial_state(rng);
    SamplerConfig cfg;
    cfg.epsilon = 0.11;
    cfg.trajectory_length = 15;
    for (auto _ : state) {
        StepResult r = dhmc_step(model, s, cfg, rng);
        benchmark::DoNotOptimize(r);
    }
}
BENCHMARK(BM_GmmDhmcStep);

void BM_HeavytailHmcStep(benchmark::State& state) {
    const Model& model = heavytail_model();
    RandomStream rng(5);
    State s = model.initial_state(rng);
    SamplerConfig cfg;
    cfg.epsilon = 0.4;
    cfg.trajectory_length = 10;
    for (auto _ : state) {
        StepResult r = hmc_step(model, s, cfg, rng);
        benchmark::DoNotOptimize(r);
    }
}
BENCHMARK(BM_HeavytailHmcStep);

void BM_CompileGmm(benchmark::State& state) {
    std::string text = gmm_program_text();
    for (auto _ : state) {
        Quadruple q = compile_text(text, "gmm");
        benchmark::DoNotOptimize(q);
    }
}
BENCHMARK(BM_CompileGmm);

}  // namespace

BENCHMARK_MAIN();
