#include "lfppl/compile.hpp"

#include <optional>

#include "lfppl/desugar.hpp"
#include "lfppl/distributions.hpp"
#include "lfppl/errors.hpp"
#include "lfppl/parser.hpp"
#include "lfppl/symdiff.hpp"

namespace lfppl {

std::string guard_to_string(const Guard& g) {
    return std::string(g.rel == GuardRel::GeqZero ? "(>=0 " : "(<0 ") + sym_to_string(g.expr) +
           ")";
}

std::string indicator_to_string(const IndicatorProduct& p) {
    if (p.guards.empty()) return "1";
    std::string out;
    for (size_t i = 0; i < p.guards.size(); ++i) {
        if (i) out += " ";
        out += guard_to_string(p.guards[i]);
    }
    return out;
}

namespace {

constexpr size_t kMaxPiecewiseCases = 4096;

void expand_pw_rec(const SymPtr& e, std::vector<Guard>& conds,
                   std::vector<std::pair<std::vector<Guard>, SymPtr>>& out) {
    if (out.size() > kMaxPiecewiseCases)
        throw compile_error("piecewise expansion produced too many regions");
    if (!contains_piecewise(e)) {
        out.emplace_back(conds, e);
        return;
    }
    if (e->kind == SymExpr::Kind::Piecewise) {
        for (auto& [gconds, gval] : expand_piecewise_value(e->guard())) {
            size_t mark = conds.size();
            conds.insert(conds.end(), gconds.begin(), gconds.end());

            conds.push_back({gval, GuardRel::LtZero});
            expand_pw_rec(e->then_value(), conds, out);
            conds.back() = {gval, GuardRel::GeqZero};
            expand_pw_rec(e->else_value(), conds, out);

            conds.resize(mark);
        }
        return;
    }
    // Apply node with piecewise somewhere below: expand arguments left to
    // right, rebuilding the application per case combination.
    const auto& args = e->args;
    std::vector<std::vector<std::pair<std::vector<Guard>, SymPtr>>> arg_cases;
    for (const auto& a : args) arg_cases.push_back(expand_piecewise_value(a));

    std::vector<size_t> choice(args.size(), 0);
    while (true) {
        std::vector<Guard> combined = conds;
        std::vector<SymPtr> values;
        for (size_t i = 0; i < args.size(); ++i) {
            const auto& [c, v] = arg_cases[i][choice[i]];
            combined.insert(combined.end(), c.begin(), c.end());
            values.push_back(v);
        }
        out.emplace_back(std::move(combined), sym_apply(e->op, std::move(values)));
        if (out.size() > kMaxPiecewiseCases)
            throw compile_error("piecewise expansion produced too many regions");

        size_t i = 0;
        for (; i < args.size(); ++i) {
            if (++choice[i] < arg_cases[i].size()) break;
            choice[i] = 0;
        }
        if (i == args.size()) break;
    }
}

// --- indicator normalization ----------------------------------------------

// Resolves literal guards, deduplicates, and detects contradictions.
// nullopt means the region is empty and its pair should be dropped.
std::optional<IndicatorProduct> normalize_indicator(const std::vector<Guard>& raw) {
    IndicatorProduct out;
    for (const auto& g : raw) {
        if (g.expr->kind == SymExpr::Kind::Lit) {
            if (guard_holds(g.expr->value, g.rel)) continue;
            return std::nullopt;
        }
        bool duplicate = false;
        for (const auto& have : out.guards) {
            if (guard_equal(have, g)) {
                duplicate = true;
                break;
            }
            if (sym_equal(have.expr, g.expr) && have.rel != g.rel) return std::nullopt;
        }
        if (!duplicate) out.guards.push_back(g);
    }
    return out;
}

std::vector<Guard> concat_guards(const IndicatorProduct& a, const IndicatorProduct& b) {
    std::vector<Guard> out = a.guards;
    out.insert(out.end(), b.guards.begin(), b.guards.end());
    return out;
}

// Splits guards containing piecewise expressions into their cases, then
// normalizes. One raw product can become several; empty regions vanish.
std::vector<IndicatorProduct> expand_indicator(const std::vector<Guard>& raw) {
    std::vector<std::vector<Guard>> pending{raw};
    std::vector<IndicatorProduct> done;
    while (!pending.empty()) {
        std::vector<Guard> guards = std::move(pending.back());
        pending.pop_back();
        size_t pw = guards.size();
        for (size_t i = 0; i < guards.size(); ++i) {
            if (contains_piecewise(guards[i].expr)) {
                pw = i;
                break;
            }
        }
        if (pw == guards.size()) {
            if (auto norm = normalize_indicator(guards)) done.push_back(std::move(*norm));
            continue;
        }
        Guard split = guards[pw];
        for (auto& [conds, value] : expand_piecewise_value(split.expr)) {
            std::vector<Guard> next;
            next.reserve(guards.size() + conds.size());
            next.insert(next.end(), guards.begin(), guards.begin() + pw);
            next.insert(next.end(), conds.begin(), conds.end());
            next.push_back({value, split.rel});
            next.insert(next.end(), guards.begin() + pw + 1, guards.end());
            pending.push_back(std::move(next));
        }
    }
    return done;
}

bool indicator_identical(const IndicatorProduct& a, const IndicatorProduct& b) {
    if (a.guards.size() != b.guards.size()) return false;
    for (size_t i = 0; i < a.guards.size(); ++i)
        if (!guard_equal(a.guards[i], b.guards[i])) return false;
    return true;
}

// --- pair collections -------------------------------------------------------

void emit_zero_pair(std::vector<DensityPair>& out, IndicatorProduct eta) {
    for (const auto& have : out)
        if (have.zero_density() && indicator_identical(have.eta, eta)) return;
    out.push_back({std::move(eta), sym_lit(0.0)});
}

void emit_density_pair(std::vector<DensityPair>& out, const std::vector<Guard>& raw, SymPtr k) {
    for (auto& eta : expand_indicator(raw)) {
        if (is_lit(k, 0.0)) {
            emit_zero_pair(out, std::move(eta));
        } else {
            out.push_back({std::move(eta), k});
        }
    }
}

void emit_factor_triple(std::vector<FactorTriple>& out, const std::vector<Guard>& raw, SymPtr l,
                        SymPtr v) {
    for (auto& zeta : expand_indicator(raw)) out.push_back({std::move(zeta), l, v});
}

// Pairwise product with zero-density absorption: a zero pair on the left
// absorbs the whole right-hand collection, which keeps the zero regions of
// successive samples disjoint without splitting them further.
std::vector<DensityPair> product2(const std::vector<DensityPair>& lhs,
                                  const std::vector<DensityPair>& rhs) {
    std::vector<DensityPair> out;
    for (const auto& a : lhs) {
        if (a.zero_density()) {
            emit_zero_pair(out, a.eta);
            continue;
        }
        for (const auto& b : rhs) {
            std::vector<Guard> guards = concat_guards(a.eta, b.eta);
            if (b.zero_density()) {
                emit_density_pair(out, guards, sym_lit(0.0));
            } else {
                emit_density_pair(out, guards, sym_mul({a.k, b.k}));
            }
        }
    }
    return out;
}

std::vector<DensityPair> trivial_density() {
    return {{IndicatorProduct{}, sym_lit(1.0)}};
}

bool is_trivial_density(const std::vector<DensityPair>& d) {
    return d.size() == 1 && d[0].eta.is_trivial() && is_lit(d[0].k, 1.0);
}

bool is_pure_value(const std::vector<FactorTriple>& f) {
    return f.size() == 1 && f[0].zeta.is_trivial() && is_lit(f[0].l, 1.0);
}

// --- translation -------------------------------------------------------------

struct Translation {
    std::set<std::string> delta;
    std::set<std::string> gamma;
    std::vector<DensityPair> density;   // D
    std::vector<FactorTriple> factors;  // F
    std::vector<BranchPredicate> predicates;
    std::vector<SampleSite> sites;
};

// Enumerates one choice of factor triple per argument translation.
class FactorCombos {
public:
    explicit FactorCombos(const std::vector<Translation>& args) : args_(args) {
        choice_.assign(args.size(), 0);
        empty_ = false;
        for (const auto& t : args)
            if (t.factors.empty()) empty_ = true;
        done_ = empty_;
    }

    bool next(std::vector<const FactorTriple*>& combo) {
        if (done_) return false;
        combo.clear();
        for (size_t i = 0; i < args_.size(); ++i)
            combo.push_back(&args_[i].factors[choice_[i]]);
        size_t i = 0;
        for (; i < args_.size(); ++i) {
            if (++choice_[i] < args_[i].factors.size()) break;
            choice_[i] = 0;
        }
        if (i == args_.size()) done_ = true;
        return true;
    }

private:
    const std::vector<Translation>& args_;
    std::vector<size_t> choice_;
    bool empty_ = false;
    bool done_ = false;
};

// Converts a partition of (guards, value) cases into one nested piecewise
// expression selecting the matching case's value.
SymPtr fold_cases_to_piecewise(const std::vector<std::pair<IndicatorProduct, SymPtr>>& cases,
                               size_t index = 0, size_t guard_index = 0) {
    if (index >= cases.size()) throw compile_error("piecewise case fold ran off its partition");
    const auto& [guards, value] = cases[index];
    if (guard_index == guards.guards.size()) return value;
    const Guard& g = guards.guards[guard_index];
    SymPtr inside = fold_cases_to_piecewise(cases, index, guard_index + 1);
    SymPtr outside = fold_cases_to_piecewise(cases, index + 1, 0);
    return g.rel == GuardRel::LtZero ? sym_piecewise(g.expr, inside, outside)
                                     : sym_piecewise(g.expr, outside, inside);
}

class Translator {
public:
    explicit Translator(const ExprPtr& root) : fresh_(all_identifiers(root)) {}

    Translation translate(const ExprPtr& e) {
        switch (e->kind) {
            case ExprKind::Var: {
                Translation t;
                t.delta.insert(e->name);
                t.density = trivial_density();
                t.factors = {{IndicatorProduct{}, sym_lit(1.0), sym_var(e->name)}};
                return t;
            }
            case ExprKind::Const: {
                Translation t;
                t.density = trivial_density();
                t.factors = {{IndicatorProduct{}, sym_lit(1.0), sym_lit(e->value)}};
                return t;
            }
            case ExprKind::PrimOp:
                return translate_op(e);
            case ExprKind::If:
                return translate_if(e);
            case ExprKind::Sample:
                return translate_sample(e);
            case ExprKind::Observe:
                return translate_observe(e);
            case ExprKind::Let:
                return translate_let(e);
            case ExprKind::List:
                throw compile_error("bracket list reached the translator; desugar first");
        }
        throw compile_error("unsupported expression form");
    }

private:
    FreshNames fresh_;

    static void merge_common(Translation& into, Translation& from) {
        into.delta.insert(from.delta.begin(), from.delta.end());
        into.gamma.insert(from.gamma.begin(), from.gamma.end());
        for (auto& p : from.predicates) into.predicates.push_back(std::move(p));
        for (auto& s : from.sites) into.sites.push_back(std::move(s));
    }

    static SymOp ast_op(const std::string& name, size_t arity) {
        if (name == "+") return SymOp::Add;
        if (name == "-") return arity == 1 ? SymOp::Neg : SymOp::Sub;
        if (name == "*") return SymOp::Mul;
        if (name == "/") return SymOp::Div;
        if (name == "exp") return SymOp::Exp;
        if (name == "log") return SymOp::Log;
        if (name == "sqrt") return SymOp::Sqrt;
        throw compile_error("operator '" + name + "' is not an analytic primitive");
    }

    Translation translate_op(const ExprPtr& e) {
        std::vector<Translation> args;
        args.reserve(e->args.size());
        for (const auto& a : e->args) args.push_back(translate(a));

        Translation t;
        t.density = trivial_density();
        for (auto& a : args) {
            t.density = product2(t.density, a.density);
            merge_common(t, a);
        }
        SymOp op = ast_op(e->name, e->args.size());
        FactorCombos combos(args);
        std::vector<const FactorTriple*> combo;
        while (combos.next(combo)) {
            std::vector<Guard> guards;
            std::vector<SymPtr> ls;
            std::vector<SymPtr> vs;
            for (const auto* triple : combo) {
                guards.insert(guards.end(), triple->zeta.guards.begin(),
                              triple->zeta.guards.end());
                ls.push_back(triple->l);
                vs.push_back(triple->v);
            }
            emit_factor_triple(t.factors, guards, sym_mul(std::move(ls)),
                               sym_apply(op, std::move(vs)));
        }
        return t;
    }

    Translation translate_if(const ExprPtr& e) {
        Translation pred = translate(e->pred);
        Translation then_t = translate(e->then_branch);
        Translation else_t = translate(e->else_branch);

        Translation t;
        t.density = product2(product2(pred.density, then_t.density), else_t.density);
        t.gamma = pred.delta;  // everything the predicate can depend on

        BranchPredicate branch;
        bool pure = pred.factors.size() == 1 && pred.factors[0].zeta.is_trivial() &&
                    is_trivial_density(then_t.density) && is_trivial_density(else_t.density) &&
                    is_pure_value(then_t.factors) && is_pure_value(else_t.factors);
        if (pure) {
            const FactorTriple& p = pred.factors[0];
            SymPtr value =
                sym_piecewise(p.v, then_t.factors[0].v, else_t.factors[0].v);
            t.factors = {{p.zeta, p.l, std::move(value)}};
            branch.cases = {{IndicatorProduct{}, p.v}};
        } else {
            // Piecewise-free predicate cases, so branch guards stay smooth.
            struct PredCase {
                IndicatorProduct guards;
                SymPtr value;
                SymPtr l;
            };
            std::vector<PredCase> cases;
            for (const auto& p : pred.factors) {
                for (auto& [conds, value] : expand_piecewise_value(p.v)) {
                    std::vector<Guard> guards = concat_guards(p.zeta, IndicatorProduct{conds});
                    for (auto& zeta : expand_indicator(guards))
                        cases.push_back({std::move(zeta), value, p.l});
                }
            }
            for (const auto& c : cases) {
                for (const auto& f2 : then_t.factors) {
                    std::vector<Guard> guards = c.guards.guards;
                    guards.push_back({c.value, GuardRel::LtZero});
                    guards.insert(guards.end(), f2.zeta.guards.begin(), f2.zeta.guards.end());
                    emit_factor_triple(t.factors, guards, sym_mul({c.l, f2.l}), f2.v);
                }
                for (const auto& f3 : else_t.factors) {
                    std::vector<Guard> guards = c.guards.guards;
                    guards.push_back({c.value, GuardRel::GeqZero});
                    guards.insert(guards.end(), f3.zeta.guards.begin(), f3.zeta.guards.end());
                    emit_factor_triple(t.factors, guards, sym_mul({c.l, f3.l}), f3.v);
                }
                branch.cases.push_back({c.guards, c.value});
            }
        }
        merge_common(t, pred);
        merge_common(t, then_t);
        merge_common(t, else_t);
        t.predicates.push_back(std::move(branch));
        return t;
    }

    Translation translate_sample(const ExprPtr& e) {
        std::vector<Translation> args;
        for (const auto& a : e->args) args.push_back(translate(a));
        const DistributionSchema& sch = schema(e->name);

        std::string z = fresh_.next("z");
        Translation t;
        t.delta.insert(z);

        std::vector<DensityPair> schema_density;
        FactorCombos combos(args);
        std::vector<const FactorTriple*> combo;
        while (combos.next(combo)) {
            std::vector<Guard> prefix;
            std::vector<SymPtr> ls;
            std::map<std::string, SymPtr> subs;
            subs[schema_placeholder(0)] = sym_var(z);
            for (size_t i = 0; i < combo.size(); ++i) {
                prefix.insert(prefix.end(), combo[i]->zeta.guards.begin(),
                              combo[i]->zeta.guards.end());
                ls.push_back(combo[i]->l);
                subs[schema_placeholder(i + 1)] = combo[i]->v;
            }
            for (const auto& piece : sch.all_pairs()) {
                std::vector<Guard> guards = prefix;
                for (const auto& g : piece.psi.guards)
                    guards.push_back({sym_substitute_many(g.expr, subs), g.rel});
                emit_density_pair(schema_density, guards, sym_substitute_many(piece.phi, subs));
            }
            emit_factor_triple(t.factors, prefix, sym_mul(std::move(ls)), sym_var(z));
        }

        t.density = trivial_density();
        for (auto& a : args) {
            t.density = product2(t.density, a.density);
            merge_common(t, a);
        }
        t.density = product2(t.density, schema_density);

        SampleSite site{z, e->name, {}};
        for (auto& a : args) site.args.push_back(fold_factor_value(a.factors));
        validate_const_params(site);
        t.sites.push_back(std::move(site));
        return t;
    }

    Translation translate_observe(const ExprPtr& e) {
        std::vector<Translation> args;
        for (const auto& a : e->args) args.push_back(translate(a));
        const DistributionSchema& sch = schema(e->name);
        if (e->observed->kind != ExprKind::Const)
            throw compile_error("observed value is not a constant; bind '" +
                                e->observed->name + "' with --const");
        double observed = e->observed->value;

        Translation t;
        t.density = trivial_density();
        for (auto& a : args) {
            t.density = product2(t.density, a.density);
            merge_common(t, a);
        }

        FactorCombos combos(args);
        std::vector<const FactorTriple*> combo;
        while (combos.next(combo)) {
            std::vector<Guard> prefix;
            std::vector<SymPtr> ls;
            std::map<std::string, SymPtr> subs;
            subs[schema_placeholder(0)] = sym_lit(observed);
            for (size_t i = 0; i < combo.size(); ++i) {
                prefix.insert(prefix.end(), combo[i]->zeta.guards.begin(),
                              combo[i]->zeta.guards.end());
                ls.push_back(combo[i]->l);
                subs[schema_placeholder(i + 1)] = combo[i]->v;
            }
            for (const auto& piece : sch.all_pairs()) {
                std::vector<Guard> guards = prefix;
                for (const auto& g : piece.psi.guards)
                    guards.push_back({sym_substitute_many(g.expr, subs), g.rel});
                std::vector<SymPtr> factors{sym_substitute_many(piece.phi, subs)};
                factors.insert(factors.end(), ls.begin(), ls.end());
                emit_factor_triple(t.factors, guards, sym_mul(std::move(factors)), sym_lit(0.0));
            }
        }
        if (e->name == "normal" || e->name == "uniform") {
            SampleSite check{"", e->name, {}};
            for (auto& a : args) check.args.push_back(fold_factor_value(a.factors));
            validate_const_params(check);
        }
        return t;
    }

    Translation translate_let(const ExprPtr& e) {
        const std::string& x = e->bindings[0].name;
        Translation def = translate(e->bindings[0].value);
        Translation body = translate(e->bodies[0]);

        // Variables standing behind the bound name, per definition triple.
        std::set<std::string> delta0;
        for (const auto& f : def.factors) sym_free_vars_into(f.v, delta0);

        Translation t;
        t.delta = def.delta;
        for (const auto& name : body.delta)
            if (name != x) t.delta.insert(name);
        if (body.delta.count(x)) t.delta.insert(delta0.begin(), delta0.end());

        t.gamma = def.gamma;
        for (const auto& name : body.gamma)
            if (name != x) t.gamma.insert(name);
        if (body.gamma.count(x)) t.gamma.insert(delta0.begin(), delta0.end());

        for (const auto& f1 : def.factors) {
            auto substituted_density = substitute_pairs(body.density, x, f1.v);
            for (const auto& d1 : def.density) {
                if (d1.zero_density()) {
                    emit_zero_pair(t.density, d1.eta);
                    continue;
                }
                for (const auto& d2 : substituted_density) {
                    std::vector<Guard> guards = concat_guards(d1.eta, f1.zeta);
                    guards.insert(guards.end(), d2.eta.guards.begin(), d2.eta.guards.end());
                    if (d2.zero_density()) {
                        emit_density_pair(t.density, guards, sym_lit(0.0));
                    } else {
                        emit_density_pair(t.density, guards, sym_mul({d1.k, d2.k}));
                    }
                }
            }
            for (const auto& f2 : substitute_triples(body.factors, x, f1.v)) {
                std::vector<Guard> guards = concat_guards(f1.zeta, f2.zeta);
                emit_factor_triple(t.factors, guards, sym_mul({f1.l, f2.l}), f2.v);
            }
        }

        t.predicates = std::move(def.predicates);
        for (auto& p : body.predicates) {
            bool mentions = false;
            for (const auto& c : p.cases) {
                if (sym_free_vars(c.expr).count(x)) mentions = true;
                for (const auto& g : c.guards.guards)
                    if (sym_free_vars(g.expr).count(x)) mentions = true;
            }
            if (!mentions) {
                t.predicates.push_back(std::move(p));
                continue;
            }
            BranchPredicate substituted;
            for (const auto& f1 : def.factors) {
                for (const auto& c : p.cases) {
                    std::vector<Guard> guards = f1.zeta.guards;
                    for (const auto& g : c.guards.guards)
                        guards.push_back({sym_substitute(g.expr, x, f1.v), g.rel});
                    SymPtr value = sym_substitute(c.expr, x, f1.v);
                    for (auto& norm : expand_indicator(guards))
                        substituted.cases.push_back({std::move(norm), value});
                }
            }
            t.predicates.push_back(std::move(substituted));
        }

        t.sites = std::move(def.sites);
        SymPtr def_value;  // folded lazily; most sites never mention x
        for (auto& s : body.sites) {
            for (auto& arg : s.args) {
                if (!sym_free_vars(arg).count(x)) continue;
                if (!def_value) def_value = fold_factor_value(def.factors);
                arg = sym_substitute(arg, x, def_value);
            }
            t.sites.push_back(std::move(s));
        }
        return t;
    }

    static std::vector<DensityPair> substitute_pairs(const std::vector<DensityPair>& pairs,
                                                     const std::string& x, const SymPtr& v) {
        std::vector<DensityPair> out;
        for (const auto& p : pairs) {
            std::vector<Guard> guards;
            guards.reserve(p.eta.guards.size());
            for (const auto& g : p.eta.guards)
                guards.push_back({sym_substitute(g.expr, x, v), g.rel});
            emit_density_pair(out, guards, sym_substitute(p.k, x, v));
        }
        return out;
    }

    static std::vector<FactorTriple> substitute_triples(const std::vector<FactorTriple>& triples,
                                                        const std::string& x, const SymPtr& v) {
        std::vector<FactorTriple> out;
        for (const auto& f : triples) {
            std::vector<Guard> guards;
            guards.reserve(f.zeta.guards.size());
            for (const auto& g : f.zeta.guards)
                guards.push_back({sym_substitute(g.expr, x, v), g.rel});
            emit_factor_triple(out, guards, sym_substitute(f.l, x, v),
                               sym_substitute(f.v, x, v));
        }
        return out;
    }

    // The value an expression stands for, folding per-region return values
    // into one piecewise expression when the translation has several.
    static SymPtr fold_factor_value(const std::vector<FactorTriple>& factors) {
        if (factors.empty()) throw compile_error("expression has no value");
        if (factors.size() == 1) return factors[0].v;
        std::vector<std::pair<IndicatorProduct, SymPtr>> cases;
        cases.reserve(factors.size());
        for (const auto& f : factors) cases.emplace_back(f.zeta, f.v);
        return fold_cases_to_piecewise(cases);
    }

    static void validate_const_params(const SampleSite& site) {
        std::vector<double> values;
        for (const auto& a : site.args) {
            if (a->kind != SymExpr::Kind::Lit) return;  // runtime-dependent, checked there
            values.push_back(a->value);
        }
        if (site.dist == "normal" && values[1] <= 0.0)
            throw compile_error("normal requires a positive scale");
        if (site.dist == "uniform" && values[0] >= values[1])
            throw compile_error("uniform requires a < b");
    }
};

bool branch_cases_equal(const BranchPredicate& a, const BranchPredicate& b) {
    if (a.cases.size() != b.cases.size()) return false;
    for (size_t i = 0; i < a.cases.size(); ++i) {
        if (!indicator_identical(a.cases[i].guards, b.cases[i].guards)) return false;
        if (!sym_equal(a.cases[i].expr, b.cases[i].expr)) return false;
    }
    return true;
}

}  // namespace

std::vector<std::pair<std::vector<Guard>, SymPtr>> expand_piecewise_value(const SymPtr& e) {
    std::vector<std::pair<std::vector<Guard>, SymPtr>> out;
    std::vector<Guard> conds;
    expand_pw_rec(e, conds, out);
    return out;
}

Quadruple translate(const Program& program, const CompileOptions& options) {
    ExprPtr root = program.root;
    for (const auto& [name, value] : options.constants)
        root = substitute_var(root, name, make_const(value));

    std::set<std::string> free = free_vars(root);
    if (!free.empty()) {
        std::string names;
        for (const auto& n : free) names += (names.empty() ? "'" : ", '") + n + "'";
        throw compile_error("unbound variable " + names +
                            " (bind program constants with --const name=value)");
    }

    Translator translator(root);
    Translation t = translator.translate(root);

    Quadruple q;
    for (const auto& site : t.sites) q.delta.push_back(site.var);
    std::set<std::string> site_names(q.delta.begin(), q.delta.end());
    if (site_names != t.delta)
        throw compile_error("internal: sampled-variable bookkeeping out of sync");

    for (const auto& name : t.gamma) {
        if (!site_names.count(name))
            throw compile_error("internal: discontinuous variable '" + name +
                                "' is not a sampled variable");
        q.gamma.push_back(name);
    }

    q.density_pairs = std::move(t.density);
    q.factor_triples = std::move(t.factors);
    q.sample_sites = std::move(t.sites);

    // Closedness of every compiled expression over the sampled variables.
    std::set<std::string> used;
    for (const auto& p : q.density_pairs) {
        for (const auto& g : p.eta.guards) sym_free_vars_into(g.expr, used);
        sym_free_vars_into(p.k, used);
    }
    for (const auto& f : q.factor_triples) {
        for (const auto& g : f.zeta.guards) sym_free_vars_into(g.expr, used);
        sym_free_vars_into(f.l, used);
        sym_free_vars_into(f.v, used);
    }
    for (const auto& name : used)
        if (!site_names.count(name))
            throw compile_error("internal: free variable '" + name + "' escaped translation");

    int next_id = 0;
    for (auto& p : t.predicates) {
        bool duplicate = false;
        for (const auto& have : q.branch_predicates)
            if (branch_cases_equal(have, p)) {
                duplicate = true;
                break;
            }
        if (duplicate) continue;
        p.id = next_id++;
        q.branch_predicates.push_back(std::move(p));
    }
    return q;
}

Quadruple compile_text(std::string_view source, const std::string& source_name,
                       const CompileOptions& options) {
    Program program{desugar(parse_text(source)), source_name};
    return translate(program, options);
}

Classification classify_variables(const Quadruple& q) {
    Classification c;
    c.discontinuous = q.gamma;
    std::sort(c.discontinuous.begin(), c.discontinuous.end());
    for (const auto& name : q.sorted_delta())
        if (!q.in_gamma(name)) c.continuous.push_back(name);
    return c;
}

}  // namespace lfppl
