#include "lfppl/inference.hpp"

#include <chrono>
#include <cmath>
#include <limits>

#include "lfppl/distributions.hpp"
#include "lfppl/errors.hpp"

namespace lfppl {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double sign(double v) {
    return v > 0.0 ? 1.0 : v < 0.0 ? -1.0 : 0.0;
}

std::vector<double> resolve_masses(const Model& model, const SamplerConfig& cfg) {
    std::vector<double> masses;
    const auto& names = model.index()->names();
    for (int slot : model.discontinuous_slots()) {
        auto it = cfg.masses.find(names[static_cast<size_t>(slot)]);
        double m = it == cfg.masses.end() ? 1.0 : it->second;
        if (m <= 0.0) throw inference_error("masses must be positive");
        masses.push_back(m);
    }
    return masses;
}

}  // namespace

void SamplerConfig::validate() const {
    if (epsilon <= 0.0) throw inference_error("step size must be positive");
    if (trajectory_length < 1) throw inference_error("trajectory length must be at least 1");
    if (num_samples < 0) throw inference_error("sample count must be non-negative");
    if (burn_in < 0) throw inference_error("burn-in must be non-negative");
}

Model::Model(Quadruple q) : evaluator_(q) {
    const VarIndex& index = *evaluator_.index();
    for (size_t i = 0; i < index.size(); ++i) {
        if (quadruple().in_gamma(index.names()[i])) {
            discontinuous_.push_back(static_cast<int>(i));
        } else {
            continuous_.push_back(static_cast<int>(i));
        }
    }
}

std::vector<int> Model::all_slots() const {
    std::vector<int> slots(index()->size());
    for (size_t i = 0; i < slots.size(); ++i) slots[i] = static_cast<int>(i);
    return slots;
}

State Model::initial_state(RandomStream& rng, int max_tries) const {
    const Quadruple& q = quadruple();
    for (int attempt = 0; attempt < max_tries; ++attempt) {
        std::map<std::string, double> values;
        bool failed = false;
        for (const auto& site : q.sample_sites) {
            std::vector<double> params;
            try {
                for (const auto& arg : site.args) params.push_back(eval_sym(arg, values));
                values[site.var] = forward_sample(site.dist, params, rng);
            } catch (const eval_error&) {
                failed = true;
                break;
            }
        }
        if (failed) continue;
        State state = State::from_map(index(), values);
        if (std::isfinite(evaluator_.log_density(state.values()))) return state;
    }
    throw inference_error("could not find an in-support initial state by forward sampling");
}

void half_step1(const GradFn& grad_log, std::span<const int> slots, double epsilon,
                std::vector<double>& x, std::vector<double>& p) {
    if (slots.empty()) return;
    thread_local std::vector<double> grad;
    grad.assign(slots.size(), 0.0);
    grad_log(x, slots, grad);
    for (size_t i = 0; i < slots.size(); ++i) {
        // dU/dx = -dlogP/dx
        p[static_cast<size_t>(slots[i])] += 0.5 * epsilon * grad[i];
        x[static_cast<size_t>(slots[i])] += 0.5 * epsilon * p[static_cast<size_t>(slots[i])];
    }
}

void half_step2(const GradFn& grad_log, std::span<const int> slots, double epsilon,
                std::vector<double>& x, std::vector<double>& p) {
    if (slots.empty()) return;
    for (size_t i = 0; i < slots.size(); ++i)
        x[static_cast<size_t>(slots[i])] += 0.5 * epsilon * p[static_cast<size_t>(slots[i])];
    thread_local std::vector<double> grad;
    grad.assign(slots.size(), 0.0);
    grad_log(x, slots, grad);
    for (size_t i = 0; i < slots.size(); ++i)
        p[static_cast<size_t>(slots[i])] += 0.5 * epsilon * grad[i];
}

void coordinatewise_sweep(const PotentialFn& potential, std::span<const int> slots,
                          std::span<const double> masses, std::span<const size_t> perm,
                          double epsilon, std::vector<double>& x, std::vector<double>& p,
                          CoordinatewiseStats* stats) {
    if (slots.empty()) return;
    double current = potential(x);
    if (std::isnan(current)) throw inference_error("potential evaluated to NaN");
    for (size_t idx : perm) {
        int slot = slots[idx];
        double m = masses[idx];
        double momentum = p[static_cast<size_t>(slot)];
        double old_x = x[static_cast<size_t>(slot)];
        x[static_cast<size_t>(slot)] = old_x + epsilon * m * sign(momentum);
        double proposed = potential(x);
        if (std::isnan(proposed)) throw inference_error("potential evaluated to NaN");
        double delta = proposed - current;
        if (m * std::abs(momentum) > delta) {
            p[static_cast<size_t>(slot)] = momentum - sign(momentum) * delta / m;
            current = proposed;
            if (stats) ++stats->accepted;
        } else {
            x[static_cast<size_t>(slot)] = old_x;
            p[static_cast<size_t>(slot)] = -momentum;
            if (stats) ++stats->reflected;
        }
    }
}

double kinetic_energy(std::span<const double> p, std::span<const int> gaussian_slots,
                      std::span<const int> laplace_slots, std::span<const double> laplace_masses) {
    double k = 0.0;
    for (int slot : gaussian_slots) {
        double v = p[static_cast<size_t>(slot)];
        k += 0.5 * v * v;
    }
    for (size_t i = 0; i < laplace_slots.size(); ++i)
        k += laplace_masses[i] * std::abs(p[static_cast<size_t>(laplace_slots[i])]);
    return k;
}

TrajectoryOutcome dhmc_trajectory(const Model& model, std::span<const int> a_slots,
                                  std::span<const int> b_slots,
                                  std::span<const double> b_masses, double epsilon, int length,
                                  const std::vector<std::vector<size_t>>& perms,
                                  std::vector<double>& x, std::vector<double>& p) {
    const DensityEvaluator& density = model.density();
    GradFn grad = [&density](std::span<const double> values, std::span<const int> slots,
                             std::span<double> out) { density.grad_log(values, slots, out); };
    PotentialFn potential = [&density](std::span<const double> values) {
        return density.potential(values);
    };

    TrajectoryOutcome outcome;
    bool track_branching = !model.quadruple().branch_predicates.empty() && !b_slots.empty();
    BranchingVector before;
    if (track_branching) before = density.branching(x);
    for (int i = 0; i < length; ++i) {
        half_step1(grad, a_slots, epsilon, x, p);
        coordinatewise_sweep(potential, b_slots, b_masses, perms[static_cast<size_t>(i)],
                             epsilon, x, p, &outcome.coordinatewise);
        half_step2(grad, a_slots, epsilon, x, p);
        if (track_branching) {
            BranchingVector after = density.branching(x);
            if (after != before) ++outcome.crossings;
            before = std::move(after);
        }
    }
    return outcome;
}

namespace {

StepResult transition(const Model& model, State& state, const SamplerConfig& cfg,
                      RandomStream& rng, std::span<const int> a_slots,
                      std::span<const int> b_slots, std::span<const double> b_masses) {
    const size_t n = model.index()->size();
    std::vector<double> x = state.values();
    std::vector<double> p(n, 0.0);
    for (int slot : a_slots) p[static_cast<size_t>(slot)] = rng.gaussian();
    for (int slot : b_slots) p[static_cast<size_t>(slot)] = rng.laplace();

    std::vector<std::vector<size_t>> perms;
    perms.reserve(static_cast<size_t>(cfg.trajectory_length));
    for (int i = 0; i < cfg.trajectory_length; ++i) perms.push_back(rng.permutation(b_slots.size()));

    double h0 = model.density().potential(state.values()) +
                kinetic_energy(p, a_slots, b_slots, b_masses);

    StepResult result;
    double h1 = kInf;
    try {
        TrajectoryOutcome outcome =
            dhmc_trajectory(model, a_slots, b_slots, b_masses, cfg.epsilon,
                            cfg.trajectory_length, perms, x, p);
        result.crossings = outcome.crossings;
        h1 = model.density().potential(x) + kinetic_energy(p, a_slots, b_slots, b_masses);
    } catch (const inference_error&) {
        result.numeric_failure = true;
    }

    double u = rng.uniform();
    double log_ratio = h0 - h1;  // -inf when the proposal is out of support
    if (!result.numeric_failure && !std::isnan(log_ratio) &&
        u < std::min(1.0, std::exp(log_ratio))) {
        state.values() = std::move(x);
        result.accepted = true;
    }
    return result;
}

}  // namespace

StepResult dhmc_step(const Model& model, State& state, const SamplerConfig& cfg,
                     RandomStream& rng) {
    std::vector<double> masses = resolve_masses(model, cfg);
    return transition(model, state, cfg, rng, model.continuous_slots(),
                      model.discontinuous_slots(), masses);
}

StepResult hmc_step(const Model& model, State& state, const SamplerConfig& cfg,
                    RandomStream& rng) {
    std::vector<int> all = model.all_slots();
    return transition(model, state, cfg, rng, all, {}, {});
}

ChainResult run_chain(const Model& model, const SamplerConfig& cfg,
                      std::optional<State> initial) {
    cfg.validate();
    RandomStream rng(cfg.seed);
    State state = initial ? std::move(*initial) : model.initial_state(rng);
    if (!std::isfinite(model.density().log_density(state.values())))
        throw inference_error("initial state has zero density");

    std::vector<double> masses = resolve_masses(model, cfg);
    std::vector<int> all = model.all_slots();
    bool dhmc = cfg.engine == Engine::Dhmc;

    ChainResult result;
    result.names = model.index()->names();

    auto start = std::chrono::steady_clock::now();
    BranchingVector previous = model.density().branching(state.values());
    long total = static_cast<long>(cfg.burn_in) + static_cast<long>(cfg.num_samples);
    result.samples.reserve(static_cast<size_t>(cfg.num_samples));
    for (long i = 0; i < total; ++i) {
        StepResult step =
            dhmc
                ? transition(model, state, cfg, rng, model.continuous_slots(),
                             model.discontinuous_slots(), masses)
                : transition(model, state, cfg, rng, all, {}, {});
        ++result.stats.steps;
        if (step.accepted) ++result.stats.accepted;
        if (step.numeric_failure) ++result.stats.numeric_failures;
        result.stats.trajectory_crossings += step.crossings;

        BranchingVector current = model.density().branching(state.values());
        if (current != previous) ++result.stats.state_crossings;
        previous = current;

        if (i >= cfg.burn_in) {
            result.samples.push_back(state.values());
            result.branch_bits.push_back(current);
        }
    }
    result.stats.elapsed_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return result;
}

}  // namespace lfppl
