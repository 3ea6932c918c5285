#include "lfppl/sym.hpp"

#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>

#include "lfppl/errors.hpp"

namespace lfppl {

namespace {

size_t combine(size_t seed, size_t v) {
    return seed ^ (v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

size_t compute_hash(const SymExpr& e) {
    size_t h = static_cast<size_t>(e.kind) * 1099511628211ULL;
    switch (e.kind) {
        case SymExpr::Kind::Var:
            return combine(h, std::hash<std::string>{}(e.name));
        case SymExpr::Kind::Lit:
            return combine(h, std::hash<double>{}(e.value));
        case SymExpr::Kind::Apply:
            h = combine(h, static_cast<size_t>(e.op));
            [[fallthrough]];
        case SymExpr::Kind::Piecewise:
            for (const auto& a : e.args) h = combine(h, a->hash);
            return h;
    }
    return h;
}

SymPtr finish(std::shared_ptr<SymExpr> e) {
    e->hash = compute_hash(*e);
    return e;
}

SymPtr apply_node(SymOp op, std::vector<SymPtr> args) {
    auto e = std::make_shared<SymExpr>();
    e->kind = SymExpr::Kind::Apply;
    e->op = op;
    e->args = std::move(args);
    return finish(std::move(e));
}

bool as_lit(const SymPtr& e, double& out) {
    if (e->kind == SymExpr::Kind::Lit) {
        out = e->value;
        return true;
    }
    return false;
}

}  // namespace

SymPtr sym_var(std::string name) {
    auto e = std::make_shared<SymExpr>();
    e->kind = SymExpr::Kind::Var;
    e->name = std::move(name);
    return finish(std::move(e));
}

SymPtr sym_lit(double value) {
    auto e = std::make_shared<SymExpr>();
    e->kind = SymExpr::Kind::Lit;
    e->value = value;
    return finish(std::move(e));
}

SymPtr sym_add(std::vector<SymPtr> args) {
    std::vector<SymPtr> flat;
    double lit_sum = 0.0;
    bool has_lit = false;
    for (auto& a : args) {
        if (a->kind == SymExpr::Kind::Apply && a->op == SymOp::Add) {
            for (const auto& inner : a->args) {
                double v;
                if (as_lit(inner, v)) {
                    lit_sum += v;
                    has_lit = true;
                } else {
                    flat.push_back(inner);
                }
            }
        } else {
            double v;
            if (as_lit(a, v)) {
                lit_sum += v;
                has_lit = true;
            } else {
                flat.push_back(std::move(a));
            }
        }
    }
    if (has_lit && lit_sum != 0.0) flat.insert(flat.begin(), sym_lit(lit_sum));
    if (flat.empty()) return sym_lit(lit_sum);
    if (flat.size() == 1) return flat[0];
    return apply_node(SymOp::Add, std::move(flat));
}

SymPtr sym_sub(SymPtr a, SymPtr b) {
    double va, vb;
    bool la = as_lit(a, va), lb = as_lit(b, vb);
    if (la && lb) return sym_lit(va - vb);
    if (lb && vb == 0.0) return a;
    if (la && va == 0.0) return sym_neg(std::move(b));
    return apply_node(SymOp::Sub, {std::move(a), std::move(b)});
}

SymPtr sym_mul(std::vector<SymPtr> args) {
    std::vector<SymPtr> flat;
    double lit_prod = 1.0;
    for (auto& a : args) {
        if (a->kind == SymExpr::Kind::Apply && a->op == SymOp::Mul) {
            for (const auto& inner : a->args) {
                double v;
                if (as_lit(inner, v)) {
                    lit_prod *= v;
                } else {
                    flat.push_back(inner);
                }
            }
        } else {
            double v;
            if (as_lit(a, v)) {
                lit_prod *= v;
            } else {
                flat.push_back(std::move(a));
            }
        }
    }
    if (lit_prod == 0.0) return sym_lit(0.0);
    if (lit_prod != 1.0) flat.insert(flat.begin(), sym_lit(lit_prod));
    if (flat.empty()) return sym_lit(lit_prod);
    if (flat.size() == 1) return flat[0];
    return apply_node(SymOp::Mul, std::move(flat));
}

SymPtr sym_div(SymPtr a, SymPtr b) {
    double va, vb;
    bool la = as_lit(a, va), lb = as_lit(b, vb);
    if (la && lb && vb != 0.0) return sym_lit(va / vb);
    if (lb && vb == 1.0) return a;
    if (la && va == 0.0) return sym_lit(0.0);
    return apply_node(SymOp::Div, {std::move(a), std::move(b)});
}

SymPtr sym_neg(SymPtr a) {
    double v;
    if (as_lit(a, v)) return sym_lit(-v);
    if (a->kind == SymExpr::Kind::Apply && a->op == SymOp::Neg) return a->args[0];
    return apply_node(SymOp::Neg, {std::move(a)});
}

SymPtr sym_exp(SymPtr a) {
    double v;
    if (as_lit(a, v)) return sym_lit(std::exp(v));
    return apply_node(SymOp::Exp, {std::move(a)});
}

SymPtr sym_log(SymPtr a) {
    double v;
    if (as_lit(a, v) && v > 0.0) return sym_lit(std::log(v));
    if (a->kind == SymExpr::Kind::Apply && a->op == SymOp::Exp) return a->args[0];
    return apply_node(SymOp::Log, {std::move(a)});
}

SymPtr sym_sqrt(SymPtr a) {
    double v;
    if (as_lit(a, v) && v >= 0.0) return sym_lit(std::sqrt(v));
    return apply_node(SymOp::Sqrt, {std::move(a)});
}

SymPtr sym_apply(SymOp op, std::vector<SymPtr> args) {
    switch (op) {
        case SymOp::Add: return sym_add(std::move(args));
        case SymOp::Sub: return sym_sub(std::move(args[0]), std::move(args[1]));
        case SymOp::Mul: return sym_mul(std::move(args));
        case SymOp::Div: return sym_div(std::move(args[0]), std::move(args[1]));
        case SymOp::Neg: return sym_neg(std::move(args[0]));
        case SymOp::Exp: return sym_exp(std::move(args[0]));
        case SymOp::Log: return sym_log(std::move(args[0]));
        case SymOp::Sqrt: return sym_sqrt(std::move(args[0]));
    }
    throw eval_error("unknown operator");
}

SymPtr sym_piecewise(SymPtr guard, SymPtr then_value, SymPtr else_value) {
    double g;
    if (as_lit(guard, g)) return g < 0.0 ? then_value : else_value;
    if (sym_equal(then_value, else_value)) return then_value;
    auto e = std::make_shared<SymExpr>();
    e->kind = SymExpr::Kind::Piecewise;
    e->args = {std::move(guard), std::move(then_value), std::move(else_value)};
    return finish(std::move(e));
}

bool sym_equal(const SymPtr& a, const SymPtr& b) {
    if (a.get() == b.get()) return true;
    if (!a || !b) return false;
    if (a->hash != b->hash || a->kind != b->kind) return false;
    switch (a->kind) {
        case SymExpr::Kind::Var:
            return a->name == b->name;
        case SymExpr::Kind::Lit:
            return a->value == b->value;
        case SymExpr::Kind::Apply:
            if (a->op != b->op) return false;
            [[fallthrough]];
        case SymExpr::Kind::Piecewise: {
            if (a->args.size() != b->args.size()) return false;
            for (size_t i = 0; i < a->args.size(); ++i)
                if (!sym_equal(a->args[i], b->args[i])) return false;
            return true;
        }
    }
    return false;
}

bool is_lit(const SymPtr& e, double value) {
    return e->kind == SymExpr::Kind::Lit && e->value == value;
}

bool contains_piecewise(const SymPtr& e) {
    if (e->kind == SymExpr::Kind::Piecewise) return true;
    for (const auto& a : e->args)
        if (contains_piecewise(a)) return true;
    return false;
}

void sym_free_vars_into(const SymPtr& e, std::set<std::string>& out) {
    if (e->kind == SymExpr::Kind::Var) {
        out.insert(e->name);
        return;
    }
    for (const auto& a : e->args) sym_free_vars_into(a, out);
}

std::set<std::string> sym_free_vars(const SymPtr& e) {
    std::set<std::string> out;
    sym_free_vars_into(e, out);
    return out;
}

SymPtr sym_substitute(const SymPtr& target, const std::string& var, const SymPtr& replacement) {
    switch (target->kind) {
        case SymExpr::Kind::Var:
            return target->name == var ? replacement : target;
        case SymExpr::Kind::Lit:
            return target;
        case SymExpr::Kind::Apply: {
            bool changed = false;
            std::vector<SymPtr> args;
            args.reserve(target->args.size());
            for (const auto& a : target->args) {
                args.push_back(sym_substitute(a, var, replacement));
                changed = changed || args.back().get() != a.get();
            }
            if (!changed) return target;
            return sym_apply(target->op, std::move(args));
        }
        case SymExpr::Kind::Piecewise: {
            SymPtr g = sym_substitute(target->guard(), var, replacement);
            SymPtr t = sym_substitute(target->then_value(), var, replacement);
            SymPtr f = sym_substitute(target->else_value(), var, replacement);
            if (g.get() == target->guard().get() && t.get() == target->then_value().get() &&
                f.get() == target->else_value().get())
                return target;
            return sym_piecewise(std::move(g), std::move(t), std::move(f));
        }
    }
    return target;
}

namespace {

void print_rec(std::ostream& os, const SymPtr& e) {
    switch (e->kind) {
        case SymExpr::Kind::Var:
            os << e->name;
            return;
        case SymExpr::Kind::Lit: {
            double v = e->value;
            if (v == static_cast<long long>(v) && std::abs(v) < 1e15) {
                os << static_cast<long long>(v);
            } else {
                char buf[32];
                std::snprintf(buf, sizeof(buf), "%.17g", v);
                os << buf;
            }
            return;
        }
        case SymExpr::Kind::Apply: {
            const char* op = nullptr;
            switch (e->op) {
                case SymOp::Add: op = "+"; break;
                case SymOp::Sub: op = "-"; break;
                case SymOp::Mul: op = "*"; break;
                case SymOp::Div: op = "/"; break;
                case SymOp::Neg: op = "-"; break;
                case SymOp::Exp: op = "exp"; break;
                case SymOp::Log: op = "log"; break;
                case SymOp::Sqrt: op = "sqrt"; break;
            }
            os << '(' << op;
            for (const auto& a : e->args) {
                os << ' ';
                print_rec(os, a);
            }
            os << ')';
            return;
        }
        case SymExpr::Kind::Piecewise:
            os << "(piecewise ";
            print_rec(os, e->guard());
            os << ' ';
            print_rec(os, e->then_value());
            os << ' ';
            print_rec(os, e->else_value());
            os << ')';
            return;
    }
}

}  // namespace

std::string sym_to_string(const SymPtr& e) {
    std::ostringstream os;
    print_rec(os, e);
    return os.str();
}

double eval_sym(const SymPtr& e, const std::map<std::string, double>& env) {
    switch (e->kind) {
        case SymExpr::Kind::Var: {
            auto it = env.find(e->name);
            if (it == env.end()) throw eval_error("unbound variable '" + e->name + "'");
            return it->second;
        }
        case SymExpr::Kind::Lit:
            return e->value;
        case SymExpr::Kind::Apply: {
            switch (e->op) {
                case SymOp::Add: {
                    double s = 0.0;
                    for (const auto& a : e->args) s += eval_sym(a, env);
                    return s;
                }
                case SymOp::Sub:
                    return eval_sym(e->args[0], env) - eval_sym(e->args[1], env);
                case SymOp::Mul: {
                    double p = 1.0;
                    for (const auto& a : e->args) p *= eval_sym(a, env);
                    return p;
                }
                case SymOp::Div: {
                    double denom = eval_sym(e->args[1], env);
                    if (denom == 0.0) throw eval_error("division by zero");
                    return eval_sym(e->args[0], env) / denom;
                }
                case SymOp::Neg:
                    return -eval_sym(e->args[0], env);
                case SymOp::Exp:
                    return std::exp(eval_sym(e->args[0], env));
                case SymOp::Log: {
                    double v = eval_sym(e->args[0], env);
                    if (v <= 0.0) throw eval_error("log of a nonpositive value");
                    return std::log(v);
                }
                case SymOp::Sqrt: {
                    double v = eval_sym(e->args[0], env);
                    if (v < 0.0) throw eval_error("sqrt of a negative value");
                    return std::sqrt(v);
                }
            }
            throw eval_error("unknown operator");
        }
        case SymExpr::Kind::Piecewise:
            return eval_sym(e->guard(), env) < 0.0 ? eval_sym(e->then_value(), env)
                                                   : eval_sym(e->else_value(), env);
    }
    throw eval_error("malformed expression");
}

}  // namespace lfppl
