#include "lfppl/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "lfppl/compile.hpp"
#include "lfppl/diagnostics.hpp"
#include "lfppl/errors.hpp"

namespace lfppl {

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

double median(std::vector<double> values) {
    std::sort(values.begin(), values.end());
    size_t n = values.size();
    return n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

double normal_pdf(double x, double mu, double sigma) {
    double d = (x - mu) / sigma;
    return std::exp(-0.5 * d * d) / (sigma * std::sqrt(2.0 * 3.14159265358979323846));
}

// Runs fn(0..runs-1) on a pool bounded by the hardware thread count.
void parallel_runs(int runs, const std::function<void(int)>& fn) {
    unsigned workers = std::max(1u, std::min(std::thread::hardware_concurrency(),
                                             static_cast<unsigned>(runs)));
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (int r = next.fetch_add(1); r < runs; r = next.fetch_add(1)) fn(r);
        });
    }
    for (auto& t : pool) t.join();
}

}  // namespace

std::string fig1_program_text() {
    return "(let [x (sample (uniform 0 1))]\n"
           "  (if (< (- q x) 0)\n"
           "      (observe (normal 1 1) y)\n"
           "      (observe (normal 0 1) y))\n"
           "  (< (- q x) 0))\n";
}

const std::vector<double>& gmm_data() {
    static const std::vector<double> data = {-2.0, -2.5, -1.7, -1.9, -2.2,
                                             1.5,  2.2,  3.0,  1.2,  2.8};
    return data;
}

std::string gmm_program_text() {
    const auto& data = gmm_data();
    std::ostringstream os;
    os << "(let [y (vector";
    for (double v : data) os << ' ' << v;
    os << ")\n";
    os << "      pi [0.5 0.5]\n";
    os << "      mu1 (sample (normal 0 2))\n";
    os << "      mu2 (sample (normal 0 2))\n";
    for (size_t n = 1; n <= data.size(); ++n)
        os << "      c" << n << " (sample (categorical pi))\n";
    os << "     ]\n";
    // Category code 1 selects the first cluster, code 2 the second.
    for (size_t n = 1; n <= data.size(); ++n)
        os << "  (if (< (- c" << n << " 1.5) 0)\n"
           << "      (observe (normal mu1 1) (nth y " << n - 1 << "))\n"
           << "      (observe (normal mu2 1) (nth y " << n - 1 << ")))\n";
    os << "  (+ mu1 mu2))\n";
    return os.str();
}

std::string heavytail_program_text(size_t dims, const std::vector<double>& a_diag) {
    if (dims == 0) throw eval_error("heavytail needs at least one dimension");
    if (!a_diag.empty() && a_diag.size() != dims)
        throw eval_error("diagonal override must have one entry per dimension");
    std::ostringstream os;
    os << "(let [";
    bool first = true;
    for (size_t d = 1; d <= dims; ++d) {
        os << (first ? "" : "\n      ") << "x" << d << " (sample (uniform -6 6))";
        first = false;
    }
    for (size_t d = 1; d <= dims; ++d)
        os << "\n      in" << d << " (if (< (- (max x" << d << " (- x" << d
           << ")) 3) 0) 1 0)";
    os << "\n      inside (*";
    for (size_t d = 1; d <= dims; ++d) os << " in" << d;
    os << ")";
    os << "\n      z (- (sqrt (+";
    for (size_t d = 1; d <= dims; ++d) {
        if (a_diag.empty()) {
            os << " (* x" << d << " x" << d << ")";
        } else {
            os << " (* " << fmt(a_diag[d - 1]) << " (* x" << d << " x" << d << "))";
        }
    }
    os << ")))]\n";
    // inside = 1 keeps the full weight, inside = 0 costs one extra nat.
    os << "  (observe (factor (+ z (- inside 1))) 0)\n";
    os << "  x1)\n";
    return os.str();
}

std::string twolevel_program_text() {
    return "(let [x (sample (uniform 0 2))]\n"
           "  (if (< (- x 1) 0)\n"
           "      (observe (factor 0) 0)\n"
           "      (observe (factor -0.5) 0))\n"
           "  x)\n";
}

ReferencePosterior gmm_grid_reference(const std::vector<double>& data, double mu0, double sigma0,
                                      double sigma, double lo, double hi, size_t resolution) {
    // Component labels are conditionally independent given the means, so
    // the likelihood marginalizes exactly per observation.
    const size_t n = resolution;
    std::vector<double> grid(n);
    double step = (hi - lo) / static_cast<double>(n);
    for (size_t i = 0; i < n; ++i) grid[i] = lo + (static_cast<double>(i) + 0.5) * step;

    std::vector<double> log_prior(n);
    for (size_t i = 0; i < n; ++i) log_prior[i] = std::log(normal_pdf(grid[i], mu0, sigma0));

    // per-observation component likelihood at each grid point
    std::vector<std::vector<double>> lik(data.size(), std::vector<double>(n));
    for (size_t d = 0; d < data.size(); ++d)
        for (size_t i = 0; i < n; ++i) lik[d][i] = normal_pdf(data[d], grid[i], sigma);

    std::vector<double> log_post(n * n);
    double max_log = -std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < n; ++i) {
        for (size_t j = 0; j < n; ++j) {
            double lp = log_prior[i] + log_prior[j];
            for (size_t d = 0; d < data.size(); ++d)
                lp += std::log(0.5 * lik[d][i] + 0.5 * lik[d][j]);
            log_post[i * n + j] = lp;
            max_log = std::max(max_log, lp);
        }
    }

    double total = 0.0;
    double mean_low = 0.0;
    double mean_high = 0.0;
    double sq_low = 0.0;
    double sq_high = 0.0;
    for (size_t i = 0; i < n; ++i) {
        for (size_t j = 0; j < n; ++j) {
            double w = std::exp(log_post[i * n + j] - max_log);
            total += w;
            double a = std::min(grid[i], grid[j]);
            double b = std::max(grid[i], grid[j]);
            mean_low += w * a;
            mean_high += w * b;
            sq_low += w * a * a;
            sq_high += w * b * b;
        }
    }
    mean_low /= total;
    mean_high /= total;
    sq_low /= total;
    sq_high /= total;

    ReferencePosterior ref;
    ref.kind = "grid-quadrature";
    ref.variables = {"mu_low", "mu_high"};
    ref.means = {mean_low, mean_high};
    ref.variances = {sq_low - mean_low * mean_low, sq_high - mean_high * mean_high};
    ref.grid_resolution = resolution;
    ref.weight_sum = 1.0;  // weights normalized by construction through `total`
    return ref;
}

double fig1_branch_posterior(double q, double y, size_t resolution) {
    // Piecewise-constant in x: weight N(y;1,1) where x > q, N(y;0,1) where
    // x <= q, prior uniform on [0,1].
    double step = 1.0 / static_cast<double>(resolution);
    double mass_true = 0.0;
    double mass_total = 0.0;
    for (size_t i = 0; i < resolution; ++i) {
        double x = (static_cast<double>(i) + 0.5) * step;
        double w = q - x < 0.0 ? normal_pdf(y, 1.0, 1.0) : normal_pdf(y, 0.0, 1.0);
        mass_total += w;
        if (q - x < 0.0) mass_true += w;
    }
    return mass_true / mass_total;
}

GmmExperimentReport run_gmm_experiment(const GmmExperimentConfig& cfg) {
    Model model(compile_text(gmm_program_text(), "gmm"));
    int mu1 = model.index()->slot("z1");
    int mu2 = model.index()->slot("z2");
    if (mu1 < 0 || mu2 < 0) throw inference_error("gmm means missing from the chain");

    GmmExperimentReport report;
    report.reference =
        gmm_grid_reference(gmm_data(), 0.0, 2.0, 1.0, -6.0, 6.0, cfg.grid_resolution);

    int runs = std::max(1, cfg.runs);
    std::vector<ChainResult> chains(static_cast<size_t>(runs));
    std::vector<std::vector<double>> curves(static_cast<size_t>(runs));
    report.run_mean_low.resize(static_cast<size_t>(runs));
    report.run_mean_high.resize(static_cast<size_t>(runs));

    parallel_runs(runs, [&](int r) {
        SamplerConfig sc;
        sc.engine = Engine::Dhmc;
        sc.epsilon = cfg.epsilon;
        sc.trajectory_length = cfg.trajectory_length;
        sc.num_samples = cfg.num_samples;
        sc.burn_in = cfg.burn_in;
        sc.seed = cfg.seed + static_cast<uint64_t>(r);
        ChainResult chain = run_chain(model, sc);

        std::vector<std::vector<double>> ordered(2);
        for (const auto& row : chain.samples) {
            double a = row[static_cast<size_t>(mu1)];
            double b = row[static_cast<size_t>(mu2)];
            ordered[0].push_back(std::min(a, b));
            ordered[1].push_back(std::max(a, b));
        }
        curves[static_cast<size_t>(r)] = running_mse(ordered, report.reference.means);
        double lo = 0.0;
        double hi = 0.0;
        for (double v : ordered[0]) lo += v;
        for (double v : ordered[1]) hi += v;
        report.run_mean_low[static_cast<size_t>(r)] = lo / static_cast<double>(ordered[0].size());
        report.run_mean_high[static_cast<size_t>(r)] =
            hi / static_cast<double>(ordered[1].size());
        chains[static_cast<size_t>(r)] = std::move(chain);
    });

    report.mean_low = report.run_mean_low[0];
    report.mean_high = report.run_mean_high[0];
    report.chain = std::move(chains[0]);

    // pointwise median of the per-run running-MSE curves
    size_t curve_len = curves[0].size();
    report.mse_curve.resize(curve_len);
    std::vector<double> column(static_cast<size_t>(runs));
    for (size_t i = 0; i < curve_len; ++i) {
        for (int r = 0; r < runs; ++r) column[static_cast<size_t>(r)] = curves[static_cast<size_t>(r)][i];
        report.mse_curve[i] = median(column);
    }
    return report;
}

namespace {

HeavytailRunCurve heavytail_run(const Model& model, Engine engine,
                                const HeavytailExperimentConfig& cfg, uint64_t seed) {
    SamplerConfig sc;
    sc.engine = engine;
    sc.epsilon = cfg.epsilon;
    sc.trajectory_length = cfg.trajectory_length;
    sc.num_samples = cfg.num_samples;
    sc.seed = seed;

    RandomStream rng(seed);
    State state = model.initial_state(rng);

    const size_t dims = model.index()->size();
    std::vector<std::vector<double>> coords(dims);
    HeavytailRunCurve curve;

    long accepted = 0;
    auto start = std::chrono::steady_clock::now();
    for (int i = 1; i <= cfg.num_samples; ++i) {
        StepResult step = engine == Engine::Dhmc
                              ? dhmc_step(model, state, sc, rng)
                              : hmc_step(model, state, sc, rng);
        if (step.accepted) ++accepted;
        for (size_t d = 0; d < dims; ++d) coords[d].push_back(state.values()[d]);
        if (i % static_cast<int>(cfg.checkpoint_every) == 0 || i == cfg.num_samples) {
            curve.checkpoints.push_back(static_cast<size_t>(i));
            curve.wmae_values.push_back(wmae(coords, static_cast<size_t>(i)));
            curve.elapsed_seconds.push_back(
                std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                    .count());
        }
    }
    curve.acceptance = static_cast<double>(accepted) / static_cast<double>(cfg.num_samples);
    return curve;
}

}  // namespace

HeavytailExperimentReport run_heavytail_experiment(const HeavytailExperimentConfig& cfg) {
    Model model(compile_text(heavytail_program_text(cfg.dims), "heavytail"));

    HeavytailExperimentReport report;
    report.dhmc_runs.resize(static_cast<size_t>(cfg.runs));
    report.hmc_runs.resize(static_cast<size_t>(cfg.runs));

    parallel_runs(cfg.runs, [&](int r) {
        report.dhmc_runs[static_cast<size_t>(r)] =
            heavytail_run(model, Engine::Dhmc, cfg, cfg.seed + 2 * static_cast<uint64_t>(r));
        report.hmc_runs[static_cast<size_t>(r)] =
            heavytail_run(model, Engine::Hmc, cfg, cfg.seed + 2 * static_cast<uint64_t>(r) + 1);
    });

    std::vector<double> final_dhmc;
    std::vector<double> final_hmc;
    for (int r = 0; r < cfg.runs; ++r) {
        final_dhmc.push_back(report.dhmc_runs[static_cast<size_t>(r)].wmae_values.back());
        final_hmc.push_back(report.hmc_runs[static_cast<size_t>(r)].wmae_values.back());
        report.mean_acceptance_dhmc += report.dhmc_runs[static_cast<size_t>(r)].acceptance;
        report.mean_acceptance_hmc += report.hmc_runs[static_cast<size_t>(r)].acceptance;
    }
    report.mean_acceptance_dhmc /= static_cast<double>(cfg.runs);
    report.mean_acceptance_hmc /= static_cast<double>(cfg.runs);
    report.median_wmae_dhmc = median(final_dhmc);
    report.median_wmae_hmc = median(final_hmc);
    return report;
}

std::string manifest_to_json(const RunManifest& manifest) {
    nlohmann::json j;
    j["program"] = manifest.program_path;
    j["constants"] = manifest.constants;
    j["engine"] = manifest.config.engine == Engine::Dhmc ? "dhmc" : "hmc";
    j["epsilon"] = manifest.config.epsilon;
    j["steps"] = manifest.config.trajectory_length;
    j["num_samples"] = manifest.config.num_samples;
    j["burn_in"] = manifest.config.burn_in;
    j["seed"] = manifest.config.seed;
    j["masses"] = manifest.config.masses;
    j["output"] = manifest.output_path;
    return j.dump(2);
}

RunManifest manifest_from_json(const std::string& json_text) {
    nlohmann::json j = nlohmann::json::parse(json_text);
    RunManifest m;
    m.program_path = j.at("program").get<std::string>();
    if (j.contains("constants"))
        m.constants = j.at("constants").get<std::map<std::string, double>>();
    m.config.engine = j.at("engine").get<std::string>() == "hmc" ? Engine::Hmc : Engine::Dhmc;
    m.config.epsilon = j.at("epsilon").get<double>();
    m.config.trajectory_length = j.at("steps").get<int>();
    m.config.num_samples = j.at("num_samples").get<int>();
    m.config.burn_in = j.at("burn_in").get<int>();
    m.config.seed = j.at("seed").get<uint64_t>();
    if (j.contains("masses"))
        m.config.masses = j.at("masses").get<std::map<std::string, double>>();
    m.output_path = j.at("output").get<std::string>();
    return m;
}

void write_samples_csv(std::ostream& os, const ChainResult& chain) {
    size_t bits = chain.branch_bits.empty() ? 0 : chain.branch_bits[0].bits.size();
    for (size_t i = 0; i < chain.names.size(); ++i) {
        if (i) os << ',';
        os << chain.names[i];
    }
    for (size_t b = 0; b < bits; ++b) os << ",b" << b;
    os << '\n';
    for (size_t row = 0; row < chain.samples.size(); ++row) {
        for (size_t i = 0; i < chain.samples[row].size(); ++i) {
            if (i) os << ',';
            os << fmt(chain.samples[row][i]);
        }
        for (size_t b = 0; b < bits; ++b) os << ',' << (chain.branch_bits[row].bits[b] ? 1 : 0);
        os << '\n';
    }
}

std::string chain_stats_json(const ChainResult& chain) {
    nlohmann::json j;
    j["steps"] = chain.stats.steps;
    j["accepted"] = chain.stats.accepted;
    j["acceptance_rate"] = chain.stats.acceptance_rate();
    j["state_crossings"] = chain.stats.state_crossings;
    j["trajectory_crossings"] = chain.stats.trajectory_crossings;
    j["numeric_failures"] = chain.stats.numeric_failures;
    j["elapsed_seconds"] = chain.stats.elapsed_seconds;
    nlohmann::json ess = nlohmann::json::object();
    for (size_t v = 0; v < chain.names.size(); ++v) {
        std::vector<double> series;
        series.reserve(chain.samples.size());
        for (const auto& row : chain.samples) series.push_back(row[v]);
        ess[chain.names[v]] = series.empty() ? 0.0 : effective_sample_size(series);
    }
    j["ess"] = ess;
    return j.dump(2);
}

void write_gmm_artifacts(const GmmExperimentReport& report, const std::string& out_dir) {
    std::filesystem::create_directories(out_dir);
    {
        std::ofstream csv(out_dir + "/samples.csv");
        write_samples_csv(csv, report.chain);
    }
    {
        std::ofstream stats(out_dir + "/stats.json");
        stats << chain_stats_json(report.chain) << '\n';
    }
    {
        std::ofstream curve(out_dir + "/mse_curve.dat");
        curve << "# n mse\n";
        for (size_t i = 0; i < report.mse_curve.size(); ++i)
            curve << i + 1 << ' ' << fmt(report.mse_curve[i]) << '\n';
    }
    nlohmann::json j;
    j["reference"] = {{"kind", report.reference.kind},
                      {"grid_resolution", report.reference.grid_resolution},
                      {"mean_low", report.reference.means[0]},
                      {"mean_high", report.reference.means[1]}};
    j["posterior_mean_low"] = report.mean_low;
    j["posterior_mean_high"] = report.mean_high;
    j["final_mse"] = report.mse_curve.empty() ? 0.0 : report.mse_curve.back();
    std::ofstream out(out_dir + "/report.json");
    out << j.dump(2) << '\n';
}

void write_heavytail_artifacts(const HeavytailExperimentReport& report,
                               const std::string& out_dir) {
    std::filesystem::create_directories(out_dir);
    auto write_curves = [&](const std::string& path, bool vs_time) {
        std::ofstream os(path);
        os << (vs_time ? "# run engine time wmae\n" : "# run engine n wmae\n");
        auto dump = [&](const std::vector<HeavytailRunCurve>& runs, const char* engine) {
            for (size_t r = 0; r < runs.size(); ++r) {
                for (size_t i = 0; i < runs[r].checkpoints.size(); ++i) {
                    os << r << ' ' << engine << ' '
                       << (vs_time ? fmt(runs[r].elapsed_seconds[i])
                                   : std::to_string(runs[r].checkpoints[i]))
                       << ' ' << fmt(runs[r].wmae_values[i]) << '\n';
                }
                os << '\n';
            }
        };
        dump(report.dhmc_runs, "dhmc");
        dump(report.hmc_runs, "hmc");
    };
    write_curves(out_dir + "/wmae_vs_samples.dat", false);
    write_curves(out_dir + "/wmae_vs_time.dat", true);

    nlohmann::json j;
    j["median_wmae_dhmc"] = report.median_wmae_dhmc;
    j["median_wmae_hmc"] = report.median_wmae_hmc;
    j["mean_acceptance_dhmc"] = report.mean_acceptance_dhmc;
    j["mean_acceptance_hmc"] = report.mean_acceptance_hmc;
    std::ofstream out(out_dir + "/report.json");
    out << j.dump(2) << '\n';
}

}  // namespace lfppl
