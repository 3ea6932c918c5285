#ifndef LFPPL_INFERENCE_HPP
#define LFPPL_INFERENCE_HPP

#include <functional>
#include <optional>
#include <span>

#include "lfppl/evaluator.hpp"
#include "lfppl/rng.hpp"

namespace lfppl {

enum class Engine { Hmc, Dhmc };

struct SamplerConfig {
    Engine engine = Engine::Dhmc;
    double epsilon = 0.1;
    int trajectory_length = 10;  // L
    int num_samples = 1000;
    int burn_in = 0;
    uint64_t seed = 1;
    std::map<std::string, double> masses;  // Laplace masses by variable, default 1

    void validate() const;
};

// Compiled program plus its prepared evaluator and variable classification.
// Immutable after construction; chains share it read-only.
class Model {
public:
    explicit Model(Quadruple q);

    const Quadruple& quadruple() const { return evaluator_.quadruple(); }
    const DensityEvaluator& density() const { return evaluator_; }
    std::shared_ptr<const VarIndex> index() const { return evaluator_.index(); }

    const std::vector<int>& continuous_slots() const { return continuous_; }
    const std::vector<int>& discontinuous_slots() const { return discontinuous_; }
    std::vector<int> all_slots() const;

    // Draws every sampled variable through its prior statement in program
    // order, retrying when the result lands at zero density.
    State initial_state(RandomStream& rng, int max_tries = 100) const;

private:
    DensityEvaluator evaluator_;
    std::vector<int> continuous_;
    std::vector<int> discontinuous_;
};

// Gradient of the log density restricted to the slots a step moves.
using GradFn = std::function<void(std::span<const double>, std::span<const int>, std::span<double>)>;
using PotentialFn = std::function<double(std::span<const double>)>;

// Momentum half-kick then position half-drift on `slots` (Gaussian
// momentum, so the drift velocity is the momentum itself).
void half_step1(const GradFn& grad_log, std::span<const int> slots, double epsilon,
                std::vector<double>& x, std::vector<double>& p);

// Mirror image: drift first, then kick at the new position.
void half_step2(const GradFn& grad_log, std::span<const int> slots, double epsilon,
                std::vector<double>& x, std::vector<double>& p);

struct CoordinatewiseStats {
    long accepted = 0;
    long reflected = 0;
};

// One sweep of the Laplace-momentum coordinate-wise integrator over
// `slots`, visiting them in `perm` order. Each coordinate proposes a move
// of exactly epsilon * mass * sign(p); the move is paid for out of kinetic
// energy when affordable and reflected otherwise, conserving H exactly.
void coordinatewise_sweep(const PotentialFn& potential, std::span<const int> slots,
                          std::span<const double> masses, std::span<const size_t> perm,
                          double epsilon, std::vector<double>& x, std::vector<double>& p,
                          CoordinatewiseStats* stats = nullptr);

double kinetic_energy(std::span<const double> p, std::span<const int> gaussian_slots,
                      std::span<const int> laplace_slots, std::span<const double> laplace_masses);

struct TrajectoryOutcome {
    int crossings = 0;  // iterations whose branching vector changed
    CoordinatewiseStats coordinatewise;
};

// The composed integrator: L iterations of half-step / coordinate-wise
// sweep / half-step, with the off-group coordinates frozen at their current
// values inside each sub-update. `perms` supplies one visiting order per
// iteration; replaying them reversed (with negated momenta) reverses the
// trajectory.
TrajectoryOutcome dhmc_trajectory(const Model& model, std::span<const int> a_slots,
                                  std::span<const int> b_slots,
                                  std::span<const double> b_masses, double epsilon, int length,
                                  const std::vector<std::vector<size_t>>& perms,
                                  std::vector<double>& x, std::vector<double>& p);

struct StepResult {
    bool accepted = false;
    int crossings = 0;
    bool numeric_failure = false;
};

// One DHMC transition: fresh Gaussian momenta on delta-minus-gamma, fresh
// Laplace momenta on gamma, the composed integrator, then a standard
// Metropolis-Hastings test on the total Hamiltonian.
StepResult dhmc_step(const Model& model, State& state, const SamplerConfig& cfg,
                     RandomStream& rng);

// Baseline used for comparisons: every variable is treated as continuous
// and updated by the plain leapfrog, whatever gamma says.
StepResult hmc_step(const Model& model, State& state, const SamplerConfig& cfg,
                    RandomStream& rng);

struct ChainStats {
    long steps = 0;
    long accepted = 0;
    long state_crossings = 0;       // branching changes between consecutive states
    long trajectory_crossings = 0;  // summed per-iteration changes inside trajectories
    long numeric_failures = 0;
    double elapsed_seconds = 0.0;

    double acceptance_rate() const {
        return steps == 0 ? 0.0 : static_cast<double>(accepted) / static_cast<double>(steps);
    }
};

struct ChainResult {
    std::vector<std::string> names;             // sorted variable order of the rows
    std::vector<std::vector<double>> samples;   // retained states
    std::vector<BranchingVector> branch_bits;   // one per retained state
    ChainStats stats;
};

ChainResult run_chain(const Model& model, const SamplerConfig& cfg,
                      std::optional<State> initial = std::nullopt);

}  // namespace lfppl

#endif
