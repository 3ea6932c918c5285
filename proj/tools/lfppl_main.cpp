// lfppl command line: compile programs to their quadruple, sample with HMC
// or DHMC, and run the built-in experiments.
//
// Exit codes: 0 success, 1 usage error, 2 compile error, 3 inference error.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "lfppl/artifact.hpp"
#include "lfppl/compile.hpp"
#include "lfppl/errors.hpp"
#include "lfppl/experiments.hpp"

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw lfppl::error("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::map<std::string, double> parse_consts(const std::vector<std::string>& defs) {
    std::map<std::string, double> out;
    for (const auto& def : defs) {
        size_t eq = def.find('=');
        if (eq == std::string::npos)
            throw CLI::ValidationError("--const", "expected name=value, got '" + def + "'");
        try {
            out[def.substr(0, eq)] = std::stod(def.substr(eq + 1));
        } catch (const std::exception&) {
            throw CLI::ValidationError("--const", "bad numeric value in '" + def + "'");
        }
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"probabilistic program compiler and inference front end"};
    app.require_subcommand(1);

    // compile
    auto* compile_cmd = app.add_subcommand("compile", "compile a program to its quadruple");
    std::string compile_path;
    std::vector<std::string> compile_consts;
    std::string compile_out;
    compile_cmd->add_option("file", compile_path, "program file (.lfppl)")->required();
    compile_cmd->add_option("--const", compile_consts, "bind a free variable, name=value");
    compile_cmd->add_option("--out", compile_out, "write JSON here instead of stdout");

    // sample
    auto* sample_cmd = app.add_subcommand("sample", "run a chain and write samples as CSV");
    std::string sample_path;
    std::vector<std::string> sample_consts;
    std::string engine = "dhmc";
    double epsilon = 0.1;
    int steps = 10;
    int num_samples = 1000;
    int burn_in = 0;
    uint64_t seed = 1;
    std::string sample_out = "samples.csv";
    std::vector<std::string> masses;
    sample_cmd->add_option("file", sample_path, "program file (.lfppl)")->required();
    sample_cmd->add_option("--const", sample_consts, "bind a free variable, name=value");
    sample_cmd->add_option("--engine", engine, "hmc or dhmc")
        ->check(CLI::IsMember({"hmc", "dhmc"}));
    sample_cmd->add_option("--epsilon", epsilon, "integrator step size");
    sample_cmd->add_option("--steps", steps, "trajectory length L");
    sample_cmd->add_option("--num-samples", num_samples, "retained samples");
    sample_cmd->add_option("--burn-in", burn_in, "discarded initial samples");
    sample_cmd->add_option("--seed", seed, "random seed");
    sample_cmd->add_option("--out", sample_out, "CSV output path");
    sample_cmd->add_option("--mass", masses, "Laplace mass, name=value");

    // experiment
    auto* exp_cmd = app.add_subcommand("experiment", "reproduce a built-in study");
    std::string experiment;
    size_t dims = 10;
    std::string scale = "desk";
    uint64_t exp_seed = 7;
    std::string out_dir = "experiment-out";
    exp_cmd->add_option("name", experiment, "gmm or heavytail")
        ->required()
        ->check(CLI::IsMember({"gmm", "heavytail"}));
    exp_cmd->add_option("--dims", dims, "heavytail dimensionality");
    exp_cmd->add_option("--scale", scale, "desk or full")
        ->check(CLI::IsMember({"desk", "full"}));
    exp_cmd->add_option("--seed", exp_seed, "random seed");
    exp_cmd->add_option("--out", out_dir, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (compile_cmd->parsed()) {
            lfppl::CompileOptions options{parse_consts(compile_consts)};
            lfppl::Quadruple q =
                lfppl::compile_text(read_file(compile_path), compile_path, options);
            std::string json = lfppl::quadruple_to_json(q);
            if (compile_out.empty()) {
                std::cout << json << '\n';
            } else {
                std::ofstream out(compile_out);
                out << json << '\n';
            }
            return 0;
        }

        if (sample_cmd->parsed()) {
            lfppl::CompileOptions options{parse_consts(sample_consts)};
            lfppl::Model model(
                lfppl::compile_text(read_file(sample_path), sample_path, options));

            lfppl::SamplerConfig cfg;
            cfg.engine = engine == "hmc" ? lfppl::Engine::Hmc : lfppl::Engine::Dhmc;
            cfg.epsilon = epsilon;
            cfg.trajectory_length = steps;
            cfg.num_samples = num_samples;
            cfg.burn_in = burn_in;
            cfg.seed = seed;
            cfg.masses = parse_consts(masses);

            lfppl::ChainResult chain;
            try {
                chain = lfppl::run_chain(model, cfg);
            } catch (const lfppl::inference_error& e) {
                std::cerr << "inference error: " << e.what() << '\n';
                return 3;
            }
            std::ofstream csv(sample_out);
            if (!csv) throw lfppl::error("cannot write '" + sample_out + "'");
            lfppl::write_samples_csv(csv, chain);
            std::ofstream stats(sample_out + ".stats.json");
            stats << lfppl::chain_stats_json(chain) << '\n';
            lfppl::RunManifest manifest{sample_path, options.constants, cfg, sample_out};
            std::ofstream mf(sample_out + ".manifest.json");
            mf << lfppl::manifest_to_json(manifest) << '\n';
            std::cout << "wrote " << chain.samples.size() << " samples to " << sample_out
                      << " (acceptance " << chain.stats.acceptance_rate() << ")\n";
            return 0;
        }

        if (exp_cmd->parsed()) {
            try {
                if (experiment == "gmm") {
                    lfppl::GmmExperimentConfig cfg;
                    cfg.seed = exp_seed;
                    if (scale == "full") {
                        cfg.num_samples = 100000;
                        cfg.burn_in = 10000;
                    }
                    lfppl::GmmExperimentReport report = lfppl::run_gmm_experiment(cfg);
                    lfppl::write_gmm_artifacts(report, out_dir);
                    std::cout << "gmm: ordered means (" << report.mean_low << ", "
                              << report.mean_high << "), reference ("
                              << report.reference.means[0] << ", "
                              << report.reference.means[1] << "), artifacts in " << out_dir
                              << '\n';
                } else {
                    lfppl::HeavytailExperimentConfig cfg;
                    cfg.dims = dims;
                    cfg.seed = exp_seed;
                    if (scale == "full") cfg.num_samples = 100000;
                    lfppl::HeavytailExperimentReport report =
                        lfppl::run_heavytail_experiment(cfg);
                    lfppl::write_heavytail_artifacts(report, out_dir);
                    std::cout << "heavytail D=" << dims << ": median WMAE dhmc "
                              << report.median_wmae_dhmc << ", hmc " << report.median_wmae_hmc
                              << ", artifacts in " << out_dir << '\n';
                }
            } catch (const lfppl::inference_error& e) {
                std::cerr << "inference error: " << e.what() << '\n';
                return 3;
            }
            return 0;
        }
    } catch (const lfppl::parse_error& e) {
        std::cerr << (compile_cmd->parsed() ? compile_path : sample_path) << ":" << e.what()
                  << '\n';
        return 2;
    } catch (const lfppl::compile_error& e) {
        std::cerr << "compile error: " << e.what() << '\n';
        return 2;
    } catch (const lfppl::error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}
