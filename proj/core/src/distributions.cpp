#include "lfppl/distributions.hpp"

#include <cmath>

#include "lfppl/errors.hpp"

namespace lfppl {

std::string schema_placeholder(size_t i) {
    return "x" + std::to_string(i);
}

namespace {

DistributionSchema make_normal_schema() {
    SymPtr x0 = sym_var(schema_placeholder(0));
    SymPtr mu = sym_var(schema_placeholder(1));
    SymPtr sigma = sym_var(schema_placeholder(2));
    SymPtr diff = sym_sub(x0, mu);
    SymPtr quad = sym_div(sym_mul({diff, diff}), sym_mul({sym_lit(2.0), sigma, sigma}));
    SymPtr norm = sym_mul({sym_sqrt(sym_lit(2.0 * 3.14159265358979323846)), sigma});
    SymPtr phi = sym_div(sym_exp(sym_neg(quad)), norm);

    DistributionSchema s;
    s.name = "normal";
    s.arity = 2;
    s.pairs = {{IndicatorProduct{}, phi}};
    return s;
}

DistributionSchema make_uniform_schema() {
    SymPtr x0 = sym_var(schema_placeholder(0));
    SymPtr a = sym_var(schema_placeholder(1));
    SymPtr b = sym_var(schema_placeholder(2));
    Guard above{sym_sub(x0, a), GuardRel::GeqZero};
    Guard below{sym_sub(b, x0), GuardRel::GeqZero};
    SymPtr phi = sym_div(sym_lit(1.0), sym_sub(b, a));

    DistributionSchema s;
    s.name = "uniform";
    s.arity = 2;
    s.pairs = {{IndicatorProduct{{above, below}}, phi}};
    // The second zero piece carries the x0 >= a guard so the pieces stay
    // disjoint even for degenerate parameters with a >= b.
    s.zero_pairs = {
        {IndicatorProduct{{Guard{sym_sub(x0, a), GuardRel::LtZero}}}, sym_lit(0.0)},
        {IndicatorProduct{{Guard{sym_sub(b, x0), GuardRel::LtZero}, above}}, sym_lit(0.0)},
    };
    return s;
}

DistributionSchema make_factor_schema() {
    DistributionSchema s;
    s.name = "factor";
    s.arity = 1;
    s.pairs = {{IndicatorProduct{}, sym_exp(sym_var(schema_placeholder(1)))}};
    return s;
}

}  // namespace

const DistributionSchema& schema(const std::string& name) {
    static const DistributionSchema normal = make_normal_schema();
    static const DistributionSchema uniform = make_uniform_schema();
    static const DistributionSchema factor = make_factor_schema();
    if (name == "normal") return normal;
    if (name == "uniform") return uniform;
    if (name == "factor") return factor;
    if (name == "bernoulli" || name == "categorical")
        throw compile_error("'" + name + "' is desugared to uniform draws plus branching; "
                            "it has no schema of its own");
    throw compile_error("unknown distribution '" + name + "'");
}

double forward_sample(const std::string& dist, const std::vector<double>& params,
                      RandomStream& rng) {
    for (double p : params)
        if (!std::isfinite(p)) throw eval_error("non-finite distribution parameter");
    if (dist == "normal") {
        if (params.size() != 2) throw eval_error("normal takes two parameters");
        if (params[1] <= 0.0) throw eval_error("normal requires a positive scale");
        return params[0] + params[1] * rng.gaussian();
    }
    if (dist == "uniform") {
        if (params.size() != 2) throw eval_error("uniform takes two parameters");
        if (params[0] >= params[1]) throw eval_error("uniform requires a < b");
        return rng.uniform(params[0], params[1]);
    }
    if (dist == "factor")
        throw eval_error("factor has no normalized density and cannot be sampled");
    throw eval_error("unknown distribution '" + dist + "'");
}

}  // namespace lfppl
