#include "lfppl/ast.hpp"

#include <cmath>
#include <sstream>

namespace lfppl {

namespace {

std::shared_ptr<Expr> node(ExprKind kind, SourcePos pos) {
    auto e = std::make_shared<Expr>();
    e->kind = kind;
    e->pos = pos;
    return e;
}

void format_number(std::ostream& os, double v) {
    if (v == static_cast<long long>(v) && std::abs(v) < 1e15) {
        os << static_cast<long long>(v);
    } else {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        os << buf;
    }
}

}  // namespace

ExprPtr make_var(std::string name, SourcePos pos) {
    auto e = node(ExprKind::Var, pos);
    e->name = std::move(name);
    return e;
}

ExprPtr make_const(double value, SourcePos pos) {
    auto e = node(ExprKind::Const, pos);
    e->value = value;
    return e;
}

ExprPtr make_primop(std::string op, std::vector<ExprPtr> args, SourcePos pos) {
    auto e = node(ExprKind::PrimOp, pos);
    e->name = std::move(op);
    e->args = std::move(args);
    return e;
}

ExprPtr make_if(ExprPtr pred, ExprPtr then_branch, ExprPtr else_branch, SourcePos pos) {
    auto e = node(ExprKind::If, pos);
    e->pred = std::move(pred);
    e->then_branch = std::move(then_branch);
    e->else_branch = std::move(else_branch);
    return e;
}

ExprPtr make_let(std::vector<LetBinding> bindings, std::vector<ExprPtr> bodies, SourcePos pos) {
    auto e = node(ExprKind::Let, pos);
    e->bindings = std::move(bindings);
    e->bodies = std::move(bodies);
    return e;
}

ExprPtr make_let1(std::string name, ExprPtr value, ExprPtr body, SourcePos pos) {
    return make_let({{std::move(name), std::move(value)}}, {std::move(body)}, pos);
}

ExprPtr make_sample(std::string dist, std::vector<ExprPtr> args, SourcePos pos) {
    auto e = node(ExprKind::Sample, pos);
    e->name = std::move(dist);
    e->args = std::move(args);
    return e;
}

ExprPtr make_observe(std::string dist, std::vector<ExprPtr> args, ExprPtr observed, SourcePos pos) {
    auto e = node(ExprKind::Observe, pos);
    e->name = std::move(dist);
    e->args = std::move(args);
    e->observed = std::move(observed);
    return e;
}

ExprPtr make_list(std::vector<ExprPtr> elements, SourcePos pos) {
    auto e = node(ExprKind::List, pos);
    e->args = std::move(elements);
    return e;
}

bool structural_equal(const ExprPtr& a, const ExprPtr& b) {
    if (a == b) return true;
    if (!a || !b) return false;
    if (a->kind != b->kind) return false;
    switch (a->kind) {
        case ExprKind::Var:
            return a->name == b->name;
        case ExprKind::Const:
            return a->value == b->value;
        case ExprKind::PrimOp:
        case ExprKind::Sample:
        case ExprKind::List: {
            if (a->name != b->name || a->args.size() != b->args.size()) return false;
            for (size_t i = 0; i < a->args.size(); ++i)
                if (!structural_equal(a->args[i], b->args[i])) return false;
            return true;
        }
        case ExprKind::Observe: {
            if (a->name != b->name || a->args.size() != b->args.size()) return false;
            for (size_t i = 0; i < a->args.size(); ++i)
                if (!structural_equal(a->args[i], b->args[i])) return false;
            return structural_equal(a->observed, b->observed);
        }
        case ExprKind::If:
            return structural_equal(a->pred, b->pred) &&
                   structural_equal(a->then_branch, b->then_branch) &&
                   structural_equal(a->else_branch, b->else_branch);
        case ExprKind::Let: {
            if (a->bindings.size() != b->bindings.size() ||
                a->bodies.size() != b->bodies.size())
                return false;
            for (size_t i = 0; i < a->bindings.size(); ++i) {
                if (a->bindings[i].name != b->bindings[i].name) return false;
                if (!structural_equal(a->bindings[i].value, b->bindings[i].value)) return false;
            }
            for (size_t i = 0; i < a->bodies.size(); ++i)
                if (!structural_equal(a->bodies[i], b->bodies[i])) return false;
            return true;
        }
    }
    return false;
}

namespace {

void free_vars_rec(const ExprPtr& e, std::set<std::string>& bound, std::set<std::string>& out) {
    if (!e) return;
    switch (e->kind) {
        case ExprKind::Var:
            if (!bound.count(e->name)) out.insert(e->name);
            return;
        case ExprKind::Const:
            return;
        case ExprKind::PrimOp:
        case ExprKind::Sample:
        case ExprKind::List:
            for (const auto& a : e->args) free_vars_rec(a, bound, out);
            return;
        case ExprKind::Observe:
            for (const auto& a : e->args) free_vars_rec(a, bound, out);
            free_vars_rec(e->observed, bound, out);
            return;
        case ExprKind::If:
            free_vars_rec(e->pred, bound, out);
            free_vars_rec(e->then_branch, bound, out);
            free_vars_rec(e->else_branch, bound, out);
            return;
        case ExprKind::Let: {
            std::vector<std::string> added;
            for (const auto& b : e->bindings) {
                free_vars_rec(b.value, bound, out);
                if (bound.insert(b.name).second) added.push_back(b.name);
            }
            for (const auto& body : e->bodies) free_vars_rec(body, bound, out);
            for (const auto& name : added) bound.erase(name);
            return;
        }
    }
}

}  // namespace

std::set<std::string> free_vars(const ExprPtr& e) {
    std::set<std::string> bound;
    std::set<std::string> out;
    free_vars_rec(e, bound, out);
    return out;
}

std::set<std::string> all_identifiers(const ExprPtr& e) {
    std::set<std::string> out;
    walk(e, [&](const Expr& n) {
        if (n.kind == ExprKind::Var) out.insert(n.name);
        if (n.kind == ExprKind::Let)
            for (const auto& b : n.bindings) out.insert(b.name);
    });
    return out;
}

void walk(const ExprPtr& e, const std::function<void(const Expr&)>& fn) {
    if (!e) return;
    fn(*e);
    for (const auto& a : e->args) walk(a, fn);
    walk(e->pred, fn);
    walk(e->then_branch, fn);
    walk(e->else_branch, fn);
    for (const auto& b : e->bindings) walk(b.value, fn);
    for (const auto& b : e->bodies) walk(b, fn);
    walk(e->observed, fn);
}

namespace {

void print_rec(std::ostream& os, const ExprPtr& e) {
    switch (e->kind) {
        case ExprKind::Var:
            os << e->name;
            return;
        case ExprKind::Const:
            format_number(os, e->value);
            return;
        case ExprKind::PrimOp: {
            os << '(' << e->name;
            for (const auto& a : e->args) {
                os << ' ';
                print_rec(os, a);
            }
            os << ')';
            return;
        }
        case ExprKind::List: {
            os << '[';
            for (size_t i = 0; i < e->args.size(); ++i) {
                if (i) os << ' ';
                print_rec(os, e->args[i]);
            }
            os << ']';
            return;
        }
        case ExprKind::Sample: {
            os << "(sample (" << e->name;
            for (const auto& a : e->args) {
                os << ' ';
                print_rec(os, a);
            }
            os << "))";
            return;
        }
        case ExprKind::Observe: {
            os << "(observe (" << e->name;
            for (const auto& a : e->args) {
                os << ' ';
                print_rec(os, a);
            }
            os << ") ";
            print_rec(os, e->observed);
            os << ')';
            return;
        }
        case ExprKind::If: {
            // Core predicates carry an implicit "< 0"; surface predicates are
            // comparison expressions and print as written.
            os << "(if ";
            if (e->pred->kind == ExprKind::PrimOp && e->pred->name == "<") {
                print_rec(os, e->pred);
            } else {
                os << "(< ";
                print_rec(os, e->pred);
                os << " 0)";
            }
            os << ' ';
            print_rec(os, e->then_branch);
            os << ' ';
            print_rec(os, e->else_branch);
            os << ')';
            return;
        }
        case ExprKind::Let: {
            os << "(let [";
            for (size_t i = 0; i < e->bindings.size(); ++i) {
                if (i) os << ' ';
                os << e->bindings[i].name << ' ';
                print_rec(os, e->bindings[i].value);
            }
            os << ']';
            for (const auto& b : e->bodies) {
                os << ' ';
                print_rec(os, b);
            }
            os << ')';
            return;
        }
    }
}

}  // namespace

std::string to_text(const ExprPtr& e) {
    std::ostringstream os;
    print_rec(os, e);
    return os.str();
}

ExprPtr substitute_var(const ExprPtr& e, const std::string& name, const ExprPtr& replacement) {
    if (!e) return e;
    switch (e->kind) {
        case ExprKind::Var:
            return e->name == name ? replacement : e;
        case ExprKind::Const:
            return e;
        case ExprKind::PrimOp:
        case ExprKind::Sample:
        case ExprKind::List: {
            std::vector<ExprPtr> args;
            args.reserve(e->args.size());
            for (const auto& a : e->args) args.push_back(substitute_var(a, name, replacement));
            auto copy = std::make_shared<Expr>(*e);
            copy->args = std::move(args);
            return copy;
        }
        case ExprKind::Observe: {
            auto copy = std::make_shared<Expr>(*e);
            for (auto& a : copy->args) a = substitute_var(a, name, replacement);
            copy->observed = substitute_var(copy->observed, name, replacement);
            return copy;
        }
        case ExprKind::If: {
            auto copy = std::make_shared<Expr>(*e);
            copy->pred = substitute_var(copy->pred, name, replacement);
            copy->then_branch = substitute_var(copy->then_branch, name, replacement);
            copy->else_branch = substitute_var(copy->else_branch, name, replacement);
            return copy;
        }
        case ExprKind::Let: {
            auto copy = std::make_shared<Expr>(*e);
            bool shadowed = false;
            for (auto& b : copy->bindings) {
                if (shadowed) break;
                b.value = substitute_var(b.value, name, replacement);
                if (b.name == name) shadowed = true;
            }
            if (!shadowed)
                for (auto& b : copy->bodies) b = substitute_var(b, name, replacement);
            return copy;
        }
    }
    return e;
}

}  // namespace lfppl
