#ifndef LFPPL_EXPERIMENTS_HPP
#define LFPPL_EXPERIMENTS_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include "lfppl/inference.hpp"

namespace lfppl {

// --- reference program texts -------------------------------------------------

// The one-uniform, two-branch program; q and y are free constants bound at
// compile time.
std::string fig1_program_text();

// Two-component Gaussian mixture: means from N(0,2), ten categorical draws
// with weights [0.5 0.5], unit-variance likelihoods on the fixed data set.
std::string gmm_program_text();
const std::vector<double>& gmm_data();

// Hyperbolic heavy-tail target on [-6,6]^dims: weight exp(-sqrt(x'Ax))
// inside the max-norm-3 box and exp(-sqrt(x'Ax)-1) outside it. A is the
// identity unless a diagonal is supplied.
std::string heavytail_program_text(size_t dims, const std::vector<double>& a_diag = {});

// One uniform draw on [0,2] with a flat potential step of 0.5 at x = 1.
std::string twolevel_program_text();

// --- posterior references ----------------------------------------------------

struct ReferencePosterior {
    std::string kind;  // "grid-quadrature" or "closed-form"
    std::vector<std::string> variables;
    std::vector<double> means;
    std::vector<double> variances;
    size_t grid_resolution = 0;
    double weight_sum = 0.0;  // after normalization; 1 up to rounding
};

// Posterior of the ordered cluster means (mu_low, mu_high) by 2-d grid
// quadrature with the component labels marginalized exactly.
ReferencePosterior gmm_grid_reference(const std::vector<double>& data, double mu0, double sigma0,
                                      double sigma, double lo, double hi, size_t resolution);

// P(branch true) of the fig1 posterior by 1-d quadrature over the uniform.
double fig1_branch_posterior(double q, double y, size_t resolution = 200000);

// --- experiment runners --------------------------------------------------------

struct GmmExperimentConfig {
    int num_samples = 20000;
    int burn_in = 2000;
    int runs = 20;  // independent chains; curves aggregate by median
    uint64_t seed = 7;
    double epsilon = 0.11;
    int trajectory_length = 10;
    size_t grid_resolution = 400;
};

struct GmmExperimentReport {
    ReferencePosterior reference;
    double mean_low = 0.0;   // ordered posterior means of the first chain
    double mean_high = 0.0;
    std::vector<double> run_mean_low;   // per-run ordered means
    std::vector<double> run_mean_high;
    std::vector<double> mse_curve;  // median over runs of the running MSE
    ChainResult chain;              // the first chain, for sample artifacts
};

GmmExperimentReport run_gmm_experiment(const GmmExperimentConfig& cfg);

struct HeavytailExperimentConfig {
    size_t dims = 10;
    int num_samples = 10000;
    int runs = 20;
    uint64_t seed = 11;
    double epsilon = 0.4;
    int trajectory_length = 10;
    size_t checkpoint_every = 100;
};

struct HeavytailRunCurve {
    std::vector<size_t> checkpoints;
    std::vector<double> wmae_values;
    std::vector<double> elapsed_seconds;
    double acceptance = 0.0;
};

struct HeavytailExperimentReport {
    std::vector<HeavytailRunCurve> dhmc_runs;
    std::vector<HeavytailRunCurve> hmc_runs;
    double median_wmae_dhmc = 0.0;  // at the final sample count
    double median_wmae_hmc = 0.0;
    double mean_acceptance_dhmc = 0.0;
    double mean_acceptance_hmc = 0.0;
};

HeavytailExperimentReport run_heavytail_experiment(const HeavytailExperimentConfig& cfg);

// --- run manifests ---------------------------------------------------------------

// Everything that determines a sampling run; same manifest, same bytes out.
struct RunManifest {
    std::string program_path;
    std::map<std::string, double> constants;
    SamplerConfig config;
    std::string output_path;
};

std::string manifest_to_json(const RunManifest& manifest);
RunManifest manifest_from_json(const std::string& json_text);

// --- artifact output -----------------------------------------------------------

// CSV with header "<sorted delta names>,b0,...,bk" and one retained sample
// per row; %.17g formatting makes equal chains byte-identical.
void write_samples_csv(std::ostream& os, const ChainResult& chain);

// Chain statistics as JSON (acceptance, crossings, numeric failures,
// per-variable effective sample sizes, wall-clock time).
std::string chain_stats_json(const ChainResult& chain);

// Writes samples.csv, stats.json, mse_curve.dat and report.json.
void write_gmm_artifacts(const GmmExperimentReport& report, const std::string& out_dir);

// Writes wmae_vs_samples.dat, wmae_vs_time.dat and report.json.
void write_heavytail_artifacts(const HeavytailExperimentReport& report,
                               const std::string& out_dir);

}  // namespace lfppl

#endif
