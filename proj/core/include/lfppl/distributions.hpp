#ifndef LFPPL_DISTRIBUTIONS_HPP
#define LFPPL_DISTRIBUTIONS_HPP

#include <string>
#include <vector>

#include "lfppl/quadruple.hpp"
#include "lfppl/rng.hpp"

namespace lfppl {

struct SchemaPair {
    IndicatorProduct psi;
    SymPtr phi;
};

// A distribution's density written as partition-gated smooth pieces over
// the placeholders x0 (the sampled or observed value) and x1..xs (the
// parameters). Zero-density pieces are kept separately so the pieces still
// partition the whole (x0..xs) space.
struct DistributionSchema {
    std::string name;
    size_t arity = 0;                    // number of parameters s
    std::vector<SchemaPair> pairs;       // nonzero smooth pieces
    std::vector<SchemaPair> zero_pairs;  // pieces whose density is identically 0

    std::vector<SchemaPair> all_pairs() const {
        std::vector<SchemaPair> all = pairs;
        all.insert(all.end(), zero_pairs.begin(), zero_pairs.end());
        return all;
    }
};

// Placeholder variable name x0..xs used inside schema expressions.
std::string schema_placeholder(size_t i);

// Registered schemas: normal, uniform, factor. bernoulli and categorical
// are desugared to uniform draws plus branching before translation, so
// asking for their schema is an error that says so.
const DistributionSchema& schema(const std::string& name);

// Draws one value. factor has no normalized density and cannot be sampled.
double forward_sample(const std::string& dist, const std::vector<double>& params,
                      RandomStream& rng);

}  // namespace lfppl

#endif
