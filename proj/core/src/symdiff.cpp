#include "lfppl/symdiff.hpp"

namespace lfppl {

SymPtr differentiate(const SymPtr& e, const std::string& var) {
    switch (e->kind) {
        case SymExpr::Kind::Var:
            return sym_lit(e->name == var ? 1.0 : 0.0);
        case SymExpr::Kind::Lit:
            return sym_lit(0.0);
        case SymExpr::Kind::Apply: {
            switch (e->op) {
                case SymOp::Add: {
                    std::vector<SymPtr> terms;
                    for (const auto& a : e->args) terms.push_back(differentiate(a, var));
                    return sym_add(std::move(terms));
                }
                case SymOp::Sub:
                    return sym_sub(differentiate(e->args[0], var), differentiate(e->args[1], var));
                case SymOp::Mul: {
                    std::vector<SymPtr> terms;
                    for (size_t i = 0; i < e->args.size(); ++i) {
                        SymPtr di = differentiate(e->args[i], var);
                        if (is_lit(di, 0.0)) continue;
                        std::vector<SymPtr> factors{di};
                        for (size_t j = 0; j < e->args.size(); ++j)
                            if (j != i) factors.push_back(e->args[j]);
                        terms.push_back(sym_mul(std::move(factors)));
                    }
                    return sym_add(std::move(terms));
                }
                case SymOp::Div: {
                    const SymPtr& a = e->args[0];
                    const SymPtr& b = e->args[1];
                    SymPtr da = differentiate(a, var);
                    SymPtr db = differentiate(b, var);
                    if (is_lit(db, 0.0)) return sym_div(std::move(da), b);
                    SymPtr num = sym_sub(sym_mul({da, b}), sym_mul({a, db}));
                    return sym_div(std::move(num), sym_mul({b, b}));
                }
                case SymOp::Neg:
                    return sym_neg(differentiate(e->args[0], var));
                case SymOp::Exp:
                    return sym_mul({e, differentiate(e->args[0], var)});
                case SymOp::Log:
                    return sym_div(differentiate(e->args[0], var), e->args[0]);
                case SymOp::Sqrt:
                    return sym_div(differentiate(e->args[0], var), sym_mul({sym_lit(2.0), e}));
            }
            return sym_lit(0.0);
        }
        case SymExpr::Kind::Piecewise:
            return sym_piecewise(e->guard(), differentiate(e->then_value(), var),
                                 differentiate(e->else_value(), var));
    }
    return sym_lit(0.0);
}

SymPtr log_transform(const SymPtr& e) {
    if (e->kind == SymExpr::Kind::Apply) {
        switch (e->op) {
            case SymOp::Mul: {
                std::vector<SymPtr> terms;
                for (const auto& a : e->args) terms.push_back(log_transform(a));
                return sym_add(std::move(terms));
            }
            case SymOp::Div:
                return sym_sub(log_transform(e->args[0]), log_transform(e->args[1]));
            case SymOp::Exp:
                return e->args[0];
            case SymOp::Sqrt:
                return sym_mul({sym_lit(0.5), log_transform(e->args[0])});
            default:
                break;
        }
    }
    if (e->kind == SymExpr::Kind::Piecewise)
        return sym_piecewise(e->guard(), log_transform(e->then_value()),
                             log_transform(e->else_value()));
    return sym_log(e);
}

SymPtr sym_substitute_many(const SymPtr& target, const std::map<std::string, SymPtr>& subs) {
    switch (target->kind) {
        case SymExpr::Kind::Var: {
            auto it = subs.find(target->name);
            return it == subs.end() ? target : it->second;
        }
        case SymExpr::Kind::Lit:
            return target;
        case SymExpr::Kind::Apply: {
            std::vector<SymPtr> args;
            args.reserve(target->args.size());
            bool changed = false;
            for (const auto& a : target->args) {
                args.push_back(sym_substitute_many(a, subs));
                changed = changed || args.back().get() != a.get();
            }
            if (!changed) return target;
            return sym_apply(target->op, std::move(args));
        }
        case SymExpr::Kind::Piecewise: {
            SymPtr g = sym_substitute_many(target->guard(), subs);
            SymPtr t = sym_substitute_many(target->then_value(), subs);
            SymPtr f = sym_substitute_many(target->else_value(), subs);
            if (g.get() == target->guard().get() && t.get() == target->then_value().get() &&
                f.get() == target->else_value().get())
                return target;
            return sym_piecewise(std::move(g), std::move(t), std::move(f));
        }
    }
    return target;
}

}  // namespace lfppl
