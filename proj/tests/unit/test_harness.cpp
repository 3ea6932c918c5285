#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "lfppl/artifact.hpp"
#include "lfppl/compile.hpp"
#include "lfppl/diagnostics.hpp"
#include "lfppl/experiments.hpp"
#include "support/fixtures.hpp"

using namespace lfppl;

TEST_SUITE_BEGIN("harness");

TEST_CASE("wmae formula") {
    // all zeros
    CHECK(wmae({{0.0, 0.0, 0.0}}, 3) == 0.0);
    // cancellation
    CHECK(wmae({{1.0, -1.0, 1.0, -1.0}}, 4) == 0.0);
    // two dimensions: (1/2) * max(|2|, |0|) = 1
    CHECK(wmae({{1.0, 1.0}, {0.5, -0.5}}, 2) == 1.0);
    // errors
    CHECK_THROWS_AS(wmae({}, 1), eval_error);
    CHECK_THROWS_AS(wmae({{1.0}}, 0), eval_error);
    CHECK_THROWS_AS(wmae({{1.0}}, 2), eval_error);
}

TEST_CASE("wmae is permutation invariant and scales linearly") {
    RandomStream rng(61);
    std::vector<std::vector<double>> dims(3, std::vector<double>(64));
    for (auto& d : dims)
        for (auto& v : d) v = rng.gaussian();
    double base = wmae(dims, 64);

    // permuting the first n samples leaves the statistic alone
    auto shuffled = dims;
    auto perm = rng.permutation(64);
    for (size_t d = 0; d < dims.size(); ++d)
        for (size_t i = 0; i < 64; ++i) shuffled[d][i] = dims[d][perm[i]];
    CHECK(wmae(shuffled, 64) == doctest::Approx(base).epsilon(1e-12));

    // scaling all samples scales the statistic by the same factor
    auto scaled = dims;
    for (auto& d : scaled)
        for (auto& v : d) v *= 2.5;
    CHECK(wmae(scaled, 64) == doctest::Approx(2.5 * base).epsilon(1e-12));
}

TEST_CASE("running mse hits zero when samples equal the reference") {
    std::vector<std::vector<double>> series{{1.5, 1.5, 1.5}, {-2.0, -2.0, -2.0}};
    auto curve = running_mse(series, {1.5, -2.0});
    for (double v : curve) CHECK(v == 0.0);
    CHECK_THROWS_AS(running_mse(series, {1.0}), eval_error);
}

TEST_CASE("gmm grid reference is stable under refinement") {
    ReferencePosterior coarse = gmm_grid_reference(gmm_data(), 0.0, 2.0, 1.0, -6.0, 6.0, 200);
    ReferencePosterior fine = gmm_grid_reference(gmm_data(), 0.0, 2.0, 1.0, -6.0, 6.0, 400);
    CHECK(coarse.weight_sum == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(fine.weight_sum == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(std::abs(coarse.means[0] - fine.means[0]) < 1e-3);
    CHECK(std::abs(coarse.means[1] - fine.means[1]) < 1e-3);
    // the data straddles zero, so the ordered means do too
    CHECK(fine.means[0] < 0.0);
    CHECK(fine.means[1] > 0.0);
}

TEST_CASE("fig1 branch posterior quadrature") {
    // hand-computed: 0.5*N(1;1,1) / (0.5*N(1;1,1) + 0.5*N(1;0,1))
    double n1 = 0.3989422804014327;
    double n0 = 0.24197072451914337;
    double expected = n1 / (n1 + n0);
    CHECK(fig1_branch_posterior(0.5, 1.0) == doctest::Approx(expected).epsilon(1e-6));
}

TEST_CASE("effective sample size bounds") {
    RandomStream rng(62);
    std::vector<double> iid(4000);
    for (auto& v : iid) v = rng.gaussian();
    double ess_iid = effective_sample_size(iid);
    CHECK(ess_iid > 2000.0);

    // strongly autocorrelated chain has far fewer effective draws
    std::vector<double> ar(4000);
    ar[0] = 0.0;
    for (size_t i = 1; i < ar.size(); ++i) ar[i] = 0.95 * ar[i - 1] + rng.gaussian();
    double ess_ar = effective_sample_size(ar);
    CHECK(ess_ar < 0.25 * ess_iid);
}

TEST_CASE("csv output shape and determinism") {
    Model model(fixtures::fig1());
    SamplerConfig cfg;
    cfg.num_samples = 50;
    cfg.seed = 9;
    ChainResult chain = run_chain(model, cfg);

    std::ostringstream a;
    write_samples_csv(a, chain);
    std::string text = a.str();
    CHECK(text.substr(0, text.find('\n')) == "z1,b0");
    size_t rows = static_cast<size_t>(std::count(text.begin(), text.end(), '\n'));
    CHECK(rows == 51);  // header + samples

    // identical seed, identical bytes
    std::ostringstream b;
    write_samples_csv(b, run_chain(model, cfg));
    CHECK(text == b.str());

    // zero samples leaves only the header
    cfg.num_samples = 0;
    std::ostringstream c;
    write_samples_csv(c, run_chain(model, cfg));
    CHECK(c.str() == "z1\n");
}

TEST_CASE("stats json fields") {
    Model model(fixtures::fig1());
    SamplerConfig cfg;
    cfg.num_samples = 100;
    cfg.seed = 9;
    std::string json = chain_stats_json(run_chain(model, cfg));
    for (const char* key :
         {"acceptance_rate", "state_crossings", "trajectory_crossings", "ess", "elapsed_seconds"})
        CHECK(json.find(key) != std::string::npos);
}

TEST_CASE("program files in the repository compile") {
    namespace fs = std::filesystem;
    fs::path dir(LFPPL_PROGRAMS_DIR);
    REQUIRE(fs::exists(dir));
    size_t seen = 0;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.path().extension() != ".lfppl") continue;
        ++seen;
        std::ifstream in(entry.path());
        std::stringstream ss;
        ss << in.rdbuf();
        CompileOptions options;
        if (entry.path().filename() == "fig1.lfppl")
            options.constants = {{"q", 0.5}, {"y", 1.0}};
        if (entry.path().filename() == "heavytail.lfppl") options.constants = {{"A", 1.0}};
        CHECK_NOTHROW(compile_text(ss.str(), entry.path().string(), options));
    }
    CHECK(seen >= 4);
}

TEST_CASE("compiled artifact json") {
    std::string json = lfppl::quadruple_to_json(fixtures::fig1(0.5, 1.0));
    for (const char* needle : {
             "\"delta\"", "\"gamma\"", "\"D\"", "\"F\"", "\"branchPredicates\"",
             "\"sampleSites\"",
             "\"z1\"",                          // the single sampled variable
             "(- 0.5 z1)",                      // the branch guard expression
             "(piecewise (- 0.5 z1) 1 0)",      // the boolean return value
             "0.3989422804014327",              // likelihood of the true branch
             "0.24197072451914337",             // and of the false branch
         })
        CHECK(json.find(needle) != std::string::npos);

    // four density entries: the two gated unit densities plus two zero pieces
    size_t entries = 0;
    for (size_t at = json.find("\"density\""); at != std::string::npos;
         at = json.find("\"density\"", at + 1))
        ++entries;
    CHECK(entries == 6);  // 4 in D, 2 in F
}

TEST_CASE("manifest json round trip") {
    RunManifest m;
    m.program_path = "programs/fig1.lfppl";
    m.constants = {{"q", 0.5}, {"y", 1.0}};
    m.config.engine = Engine::Hmc;
    m.config.epsilon = 0.27;
    m.config.trajectory_length = 12;
    m.config.num_samples = 321;
    m.config.burn_in = 21;
    m.config.seed = 987654321;
    m.config.masses = {{"z1", 1.5}};
    m.output_path = "out.csv";

    RunManifest back = manifest_from_json(manifest_to_json(m));
    CHECK(back.program_path == m.program_path);
    CHECK(back.constants == m.constants);
    CHECK(back.config.engine == m.config.engine);
    CHECK(back.config.epsilon == m.config.epsilon);
    CHECK(back.config.trajectory_length == m.config.trajectory_length);
    CHECK(back.config.num_samples == m.config.num_samples);
    CHECK(back.config.burn_in == m.config.burn_in);
    CHECK(back.config.seed == m.config.seed);
    CHECK(back.config.masses == m.config.masses);
    CHECK(back.output_path == m.output_path);
}

TEST_CASE("one-dimensional heavytail target is symmetric around zero") {
    // Fixed-size coordinate moves confine one chain to a lattice whose
    // offset skews its mean; independent chains carry independent offsets,
    // so the pooled mean centers and the chain means give the error scale.
    Model model(compile_text(heavytail_program_text(1), "ht1"));
    const int chains = 16;
    std::vector<double> means;
    for (int c = 0; c < chains; ++c) {
        SamplerConfig cfg;
        cfg.engine = Engine::Dhmc;
        cfg.epsilon = 0.4;
        cfg.trajectory_length = 10;
        cfg.num_samples = 1000;
        cfg.seed = 13 + static_cast<uint64_t>(c);
        ChainResult chain = run_chain(model, cfg);
        double m = 0.0;
        for (const auto& row : chain.samples) m += row[0];
        means.push_back(m / static_cast<double>(chain.samples.size()));
    }
    double grand = 0.0;
    for (double m : means) grand += m;
    grand /= chains;
    double var = 0.0;
    for (double m : means) var += (m - grand) * (m - grand);
    var /= chains - 1;
    double se = std::sqrt(var / chains);
    CHECK(std::abs(grand) < 3.0 * se);
}

TEST_CASE("heavytail program text honors a diagonal override") {
    Quadruple q = compile_text(heavytail_program_text(2, {4.0, 4.0}), "ht-diag");
    DensityEvaluator ev(q);
    // U = sqrt(4 x1^2 + 4 x2^2) + const inside the inner box
    State s = State::from_map(ev.index(), {{"z1", 1.0}, {"z2", 1.0}});
    State s2 = State::from_map(ev.index(), {{"z1", 2.0}, {"z2", 2.0}});
    double diff = ev.potential(s2.values()) - ev.potential(s.values());
    CHECK(diff == doctest::Approx(2.0 * std::sqrt(8.0) - std::sqrt(8.0)).epsilon(1e-9));
}

TEST_SUITE_END();
