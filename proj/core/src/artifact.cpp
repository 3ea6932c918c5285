#include "lfppl/artifact.hpp"

#include <json.hpp>

namespace lfppl {

namespace {

nlohmann::json guards_json(const IndicatorProduct& p) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& g : p.guards)
        out.push_back({{"rel", g.rel == GuardRel::GeqZero ? ">=0" : "<0"},
                       {"expr", sym_to_string(g.expr)}});
    return out;
}

}  // namespace

std::string quadruple_to_json(const Quadruple& q, int indent) {
    nlohmann::json j;
    j["delta"] = q.delta;
    j["gamma"] = q.gamma;

    j["D"] = nlohmann::json::array();
    for (const auto& p : q.density_pairs)
        j["D"].push_back({{"guards", guards_json(p.eta)}, {"density", sym_to_string(p.k)}});

    j["F"] = nlohmann::json::array();
    for (const auto& f : q.factor_triples)
        j["F"].push_back({{"guards", guards_json(f.zeta)},
                          {"density", sym_to_string(f.l)},
                          {"value", sym_to_string(f.v)}});

    j["branchPredicates"] = nlohmann::json::array();
    for (const auto& b : q.branch_predicates) {
        nlohmann::json cases = nlohmann::json::array();
        for (const auto& c : b.cases)
            cases.push_back({{"guards", guards_json(c.guards)}, {"expr", sym_to_string(c.expr)}});
        j["branchPredicates"].push_back({{"id", b.id}, {"cases", cases}});
    }

    j["sampleSites"] = nlohmann::json::array();
    for (const auto& s : q.sample_sites) {
        nlohmann::json args = nlohmann::json::array();
        for (const auto& a : s.args) args.push_back(sym_to_string(a));
        j["sampleSites"].push_back({{"var", s.var}, {"dist", s.dist}, {"args", args}});
    }
    return j.dump(indent);
}

}  // namespace lfppl
