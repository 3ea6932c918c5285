#ifndef LFPPL_QUADRUPLE_HPP
#define LFPPL_QUADRUPLE_HPP

#include <algorithm>
#include <string>
#include <vector>

#include "lfppl/sym.hpp"

namespace lfppl {

// Ties break toward GeqZero: a guard value of exactly zero satisfies the
// closed half and not the open one.
enum class GuardRel { GeqZero, LtZero };

struct Guard {
    SymPtr expr;
    GuardRel rel;
};

inline bool guard_holds(double value, GuardRel rel) {
    return rel == GuardRel::GeqZero ? value >= 0.0 : value < 0.0;
}

inline bool guard_equal(const Guard& a, const Guard& b) {
    return a.rel == b.rel && sym_equal(a.expr, b.expr);
}

// Finite product of indicator factors; the empty product is the constant 1.
struct IndicatorProduct {
    std::vector<Guard> guards;

    bool is_trivial() const { return guards.empty(); }
};

std::string guard_to_string(const Guard& g);
std::string indicator_to_string(const IndicatorProduct& p);

// One sample-density piece: eta gates the smooth term k.
struct DensityPair {
    IndicatorProduct eta;
    SymPtr k;

    bool zero_density() const { return is_lit(k, 0.0); }
};

// One observe piece: zeta gates the smooth term l; v is the region's return
// value and carries no probability mass.
struct FactorTriple {
    IndicatorProduct zeta;
    SymPtr l;
    SymPtr v;
};

// An if-predicate, kept as partition cases so that predicates whose value
// expression differs per region stay evaluable: exactly one case is active
// at any state and its expression's sign gives the branch bit.
struct BranchCase {
    IndicatorProduct guards;
    SymPtr expr;
};

struct BranchPredicate {
    int id = 0;
    std::vector<BranchCase> cases;
};

// One sample statement: the fresh variable it introduced, its distribution
// and the (fully substituted) parameter expressions. Retained in program
// order for forward-sampling chain initializations.
struct SampleSite {
    std::string var;
    std::string dist;
    std::vector<SymPtr> args;
};

struct Quadruple {
    std::vector<std::string> delta;  // sampled variables, in sampling order
    std::vector<std::string> gamma;  // the discontinuity-marked subset
    std::vector<DensityPair> density_pairs;    // D, zero-density pairs retained
    std::vector<FactorTriple> factor_triples;  // F
    std::vector<BranchPredicate> branch_predicates;
    std::vector<SampleSite> sample_sites;

    std::vector<std::string> sorted_delta() const {
        std::vector<std::string> names = delta;
        std::sort(names.begin(), names.end());
        return names;
    }

    bool in_gamma(const std::string& name) const {
        return std::find(gamma.begin(), gamma.end(), name) != gamma.end();
    }
};

}  // namespace lfppl

#endif
