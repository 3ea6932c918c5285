#include "lfppl/desugar.hpp"

#include <cmath>
#include <map>
#include <set>

#include "lfppl/parser.hpp"

namespace lfppl {

namespace {

class Desugarer {
public:
    explicit Desugarer(const ExprPtr& root) : taken_(all_identifiers(root)) {}

    ExprPtr run(const ExprPtr& root) { return transform(root); }

private:
    std::set<std::string> taken_;
    std::map<std::string, int> counters_;
    // Names bound to vector literals, inlined at use sites.
    std::map<std::string, std::vector<ExprPtr>> vectors_;

    std::string fresh(const std::string& hint) {
        std::string name;
        do {
            name = hint + std::to_string(++counters_[hint]);
        } while (taken_.count(name));
        taken_.insert(name);
        return name;
    }

    static bool contains_random_choice(const ExprPtr& e) {
        bool found = false;
        walk(e, [&](const Expr& n) {
            if (n.kind == ExprKind::Sample || n.kind == ExprKind::Observe) found = true;
        });
        return found;
    }

    const std::vector<ExprPtr>* lookup_vector(const ExprPtr& e) {
        if (e->kind == ExprKind::Var) {
            auto it = vectors_.find(e->name);
            return it == vectors_.end() ? nullptr : &it->second;
        }
        return nullptr;
    }

    std::vector<ExprPtr> vector_elements(const ExprPtr& e, const char* context) {
        if (e->kind == ExprKind::List) {
            std::vector<ExprPtr> elems;
            for (const auto& el : e->args) elems.push_back(transform(el));
            return elems;
        }
        if (e->kind == ExprKind::PrimOp && e->name == "vector") {
            std::vector<ExprPtr> elems;
            for (const auto& el : e->args) elems.push_back(transform(el));
            return elems;
        }
        if (const auto* elems = lookup_vector(e)) return *elems;
        throw parse_error(std::string(context) + " expects a vector literal or a name bound to one",
                          e->pos);
    }

    std::vector<double> literal_weights(const ExprPtr& arg) {
        std::vector<double> weights;
        for (const auto& el : vector_elements(arg, "categorical")) {
            if (el->kind != ExprKind::Const)
                throw parse_error("categorical weights must be numeric literals", el->pos);
            weights.push_back(el->value);
        }
        if (weights.empty()) throw parse_error("categorical needs at least one weight", arg->pos);
        double sum = 0.0;
        for (double w : weights) {
            if (w < 0.0) throw parse_error("categorical weights must be non-negative", arg->pos);
            sum += w;
        }
        if (std::abs(sum - 1.0) > 1e-9)
            throw parse_error("categorical weights must sum to 1", arg->pos);
        return weights;
    }

    // (< a b) appearing as a value: encode the boolean as 1/0.
    ExprPtr comparison_value(const ExprPtr& e) {
        ExprPtr pred = difference(transform(e->args[0]), transform(e->args[1]), e->pos);
        return make_if(pred, make_const(1.0, e->pos), make_const(0.0, e->pos), e->pos);
    }

    static ExprPtr difference(ExprPtr a, ExprPtr b, SourcePos pos) {
        if (b->kind == ExprKind::Const && b->value == 0.0) return a;
        return make_primop("-", {std::move(a), std::move(b)}, pos);
    }

    ExprPtr categorical_sample(const ExprPtr& e) {
        std::vector<double> weights = literal_weights(e->args[0]);
        const size_t k = weights.size();
        if (k == 1) return make_const(1.0, e->pos);
        std::string u = fresh("u");
        // Nested ifs over cumulative sums, returning 1-based category codes.
        ExprPtr body = make_const(static_cast<double>(k), e->pos);
        double cumulative = 1.0;
        for (size_t i = k - 1; i-- > 0;) {
            cumulative -= weights[i + 1];
            ExprPtr pred = make_primop(
                "-", {make_var(u, e->pos), make_const(cumulative, e->pos)}, e->pos);
            body = make_if(pred, make_const(static_cast<double>(i + 1), e->pos), body, e->pos);
        }
        ExprPtr draw = make_sample("uniform", {make_const(0.0, e->pos), make_const(1.0, e->pos)},
                                   e->pos);
        return make_let1(u, std::move(draw), std::move(body), e->pos);
    }

    ExprPtr bernoulli_sample(const ExprPtr& e) {
        ExprPtr p = transform(e->args[0]);
        std::string u = fresh("u");
        // u < 1-p selects 0 (probability 1-p), otherwise 1.
        ExprPtr threshold = make_primop("-", {make_const(1.0, e->pos), p}, e->pos);
        ExprPtr pred = make_primop("-", {make_var(u, e->pos), std::move(threshold)}, e->pos);
        ExprPtr body = make_if(std::move(pred), make_const(0.0, e->pos), make_const(1.0, e->pos),
                               e->pos);
        ExprPtr draw = make_sample("uniform", {make_const(0.0, e->pos), make_const(1.0, e->pos)},
                                   e->pos);
        return make_let1(u, std::move(draw), std::move(body), e->pos);
    }

    ExprPtr transform(const ExprPtr& e) {
        switch (e->kind) {
            case ExprKind::Var:
                if (vectors_.count(e->name))
                    throw parse_error("vector '" + e->name +
                                          "' can only be used with nth or categorical",
                                      e->pos);
                return e;
            case ExprKind::Const:
                return e;
            case ExprKind::List:
                throw parse_error("bracket list is only valid as a vector/categorical operand",
                                  e->pos);
            case ExprKind::PrimOp:
                return transform_primop(e);
            case ExprKind::If: {
                // Parser guarantees the condition is (< a b).
                ExprPtr pred = difference(transform(e->pred->args[0]),
                                          transform(e->pred->args[1]), e->pred->pos);
                return make_if(std::move(pred), transform(e->then_branch),
                               transform(e->else_branch), e->pos);
            }
            case ExprKind::Sample: {
                if (e->name == "categorical") return categorical_sample(e);
                if (e->name == "bernoulli") return bernoulli_sample(e);
                std::vector<ExprPtr> args;
                for (const auto& a : e->args) args.push_back(transform(a));
                return make_sample(e->name, std::move(args), e->pos);
            }
            case ExprKind::Observe:
                return transform_observe(e);
            case ExprKind::Let:
                return transform_let(e);
        }
        throw parse_error("unsupported expression", e->pos);
    }

    ExprPtr transform_primop(const ExprPtr& e) {
        if (e->name == "<") return comparison_value(e);
        if (e->name == "max") {
            if (contains_random_choice(e->args[0]) || contains_random_choice(e->args[1]))
                throw parse_error("max over sample/observe expressions is not supported", e->pos);
            ExprPtr a = transform(e->args[0]);
            ExprPtr b = transform(e->args[1]);
            ExprPtr pred = make_primop("-", {a, b}, e->pos);
            return make_if(std::move(pred), b, a, e->pos);
        }
        if (e->name == "vector")
            throw parse_error("vector is only valid as a let-bound value or nth operand", e->pos);
        if (e->name == "nth") {
            ExprPtr index = e->args[1];
            if (index->kind != ExprKind::Const)
                throw parse_error("nth requires a literal constant index", e->pos);
            double raw = index->value;
            if (raw != std::floor(raw) || raw < 0)
                throw parse_error("nth index must be a non-negative integer", e->pos);
            auto elems = vector_elements(e->args[0], "nth");
            size_t k = static_cast<size_t>(raw);
            if (k >= elems.size())
                throw parse_error("nth index out of range", e->pos);
            return elems[k];
        }
        std::vector<ExprPtr> args;
        for (const auto& a : e->args) args.push_back(transform(a));
        return make_primop(e->name, std::move(args), e->pos);
    }

    ExprPtr transform_observe(const ExprPtr& e) {
        ExprPtr observed = transform(e->observed);
        if (e->name == "bernoulli" || e->name == "categorical") {
            if (observed->kind != ExprKind::Const)
                throw parse_error("observed value must be a constant", e->pos);
            ExprPtr log_weight;
            if (e->name == "bernoulli") {
                ExprPtr p = transform(e->args[0]);
                if (observed->value == 1.0) {
                    log_weight = make_primop("log", {std::move(p)}, e->pos);
                } else if (observed->value == 0.0) {
                    log_weight = make_primop(
                        "log", {make_primop("-", {make_const(1.0, e->pos), std::move(p)}, e->pos)},
                        e->pos);
                } else {
                    throw parse_error("bernoulli observation must be 0 or 1", e->pos);
                }
            } else {
                std::vector<double> weights = literal_weights(e->args[0]);
                double c = observed->value;
                if (c != std::floor(c) || c < 1 || c > static_cast<double>(weights.size()))
                    throw parse_error("categorical observation must be a category code", e->pos);
                log_weight = make_const(std::log(weights[static_cast<size_t>(c) - 1]), e->pos);
            }
            return make_observe("factor", {std::move(log_weight)}, make_const(0.0, e->pos),
                                e->pos);
        }
        std::vector<ExprPtr> args;
        for (const auto& a : e->args) args.push_back(transform(a));
        // A bare variable is allowed here: program constants bound at
        // compile time turn it into a literal before translation.
        if (observed->kind != ExprKind::Const && observed->kind != ExprKind::Var)
            throw parse_error("observed value must be a constant", e->pos);
        return make_observe(e->name, std::move(args), std::move(observed), e->pos);
    }

    ExprPtr transform_let(const ExprPtr& e) {
        return let_bindings(e, 0);
    }

    // Unravels bindings left to right, then the bodies.
    ExprPtr let_bindings(const ExprPtr& e, size_t index) {
        if (index == e->bindings.size()) return let_bodies(e, 0);

        const LetBinding& binding = e->bindings[index];
        const ExprPtr& value = binding.value;
        bool is_vector = value->kind == ExprKind::List ||
                         (value->kind == ExprKind::PrimOp && value->name == "vector") ||
                         lookup_vector(value) != nullptr;
        if (is_vector) {
            auto elems = vector_elements(value, "vector binding");
            auto saved = vectors_;
            vectors_[binding.name] = std::move(elems);
            ExprPtr rest = let_bindings(e, index + 1);
            vectors_ = std::move(saved);
            return rest;
        }

        ExprPtr bound = transform(value);
        auto saved = vectors_;
        vectors_.erase(binding.name);  // shadowing a vector name with a scalar
        ExprPtr rest = let_bindings(e, index + 1);
        vectors_ = std::move(saved);
        return make_let1(binding.name, std::move(bound), std::move(rest), e->pos);
    }

    ExprPtr let_bodies(const ExprPtr& e, size_t index) {
        if (index == e->bodies.size() - 1) return transform(e->bodies[index]);
        ExprPtr stmt = transform(e->bodies[index]);
        ExprPtr rest = let_bodies(e, index + 1);
        return make_let1(fresh("_"), std::move(stmt), std::move(rest), e->pos);
    }
};

void validate_rec(const ExprPtr& e) {
    switch (e->kind) {
        case ExprKind::Var:
        case ExprKind::Const:
            return;
        case ExprKind::List:
            throw parse_error("bracket list survived desugaring", e->pos);
        case ExprKind::PrimOp: {
            if (!is_core_op(e->name))
                throw parse_error("operator '" + e->name + "' is not an analytic primitive",
                                  e->pos);
            for (const auto& a : e->args) validate_rec(a);
            return;
        }
        case ExprKind::If:
            validate_rec(e->pred);
            validate_rec(e->then_branch);
            validate_rec(e->else_branch);
            return;
        case ExprKind::Let: {
            if (e->bindings.size() != 1 || e->bodies.size() != 1)
                throw parse_error("let survived desugaring with multiple bindings or bodies",
                                  e->pos);
            validate_rec(e->bindings[0].value);
            validate_rec(e->bodies[0]);
            return;
        }
        case ExprKind::Sample: {
            if (e->name != "normal" && e->name != "uniform")
                throw parse_error("sample of '" + e->name + "' survived desugaring", e->pos);
            for (const auto& a : e->args) validate_rec(a);
            return;
        }
        case ExprKind::Observe: {
            if (e->name != "normal" && e->name != "uniform" && e->name != "factor")
                throw parse_error("observe of '" + e->name + "' survived desugaring", e->pos);
            for (const auto& a : e->args) validate_rec(a);
            if (e->observed->kind != ExprKind::Const && e->observed->kind != ExprKind::Var)
                throw parse_error("observed value must be a constant", e->pos);
            return;
        }
    }
}

}  // namespace

ExprPtr desugar(const ExprPtr& surface) {
    Desugarer d(surface);
    ExprPtr core = d.run(surface);
    validate_core(core);
    return core;
}

void validate_core(const ExprPtr& e) {
    validate_rec(e);
}

}  // namespace lfppl
