#ifndef LFPPL_AST_HPP
#define LFPPL_AST_HPP

#include <functional>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "lfppl/errors.hpp"

namespace lfppl {

// Expression tree shared by the surface syntax and the desugared core
// language. After desugaring only Var, Const, PrimOp, If, Let (single
// binding, single body), Sample and Observe remain; List and the sugar
// operators are gone.
enum class ExprKind {
    Var,
    Const,
    PrimOp,
    If,
    Let,
    Sample,
    Observe,
    List,  // bracket literal, operand of vector/categorical only
};

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct LetBinding {
    std::string name;
    ExprPtr value;
};

struct Expr {
    ExprKind kind;
    SourcePos pos;

    std::string name;          // Var name; PrimOp op; Sample/Observe distribution
    double value = 0.0;        // Const
    std::vector<ExprPtr> args; // PrimOp args, List elements, distribution args

    // If: in the surface tree `pred` holds the comparison expression; in the
    // core tree it holds e with the meaning "e < 0".
    ExprPtr pred;
    ExprPtr then_branch;
    ExprPtr else_branch;

    // Let: surface trees may carry several bindings and bodies; the core
    // tree has exactly one of each.
    std::vector<LetBinding> bindings;
    std::vector<ExprPtr> bodies;

    // Observe
    ExprPtr observed;
};

struct Program {
    ExprPtr root;
    std::string source_name;
};

// Node builders.
ExprPtr make_var(std::string name, SourcePos pos = {});
ExprPtr make_const(double value, SourcePos pos = {});
ExprPtr make_primop(std::string op, std::vector<ExprPtr> args, SourcePos pos = {});
ExprPtr make_if(ExprPtr pred, ExprPtr then_branch, ExprPtr else_branch, SourcePos pos = {});
ExprPtr make_let(std::vector<LetBinding> bindings, std::vector<ExprPtr> bodies, SourcePos pos = {});
ExprPtr make_let1(std::string name, ExprPtr value, ExprPtr body, SourcePos pos = {});
ExprPtr make_sample(std::string dist, std::vector<ExprPtr> args, SourcePos pos = {});
ExprPtr make_observe(std::string dist, std::vector<ExprPtr> args, ExprPtr observed, SourcePos pos = {});
ExprPtr make_list(std::vector<ExprPtr> elements, SourcePos pos = {});

bool structural_equal(const ExprPtr& a, const ExprPtr& b);

// Variables free in `e` (let bindings scope over their bodies and later
// binding values, Clojure style).
std::set<std::string> free_vars(const ExprPtr& e);

// Every identifier appearing anywhere (binders, references). Used to keep
// generated names disjoint from user names.
std::set<std::string> all_identifiers(const ExprPtr& e);

// Pre-order traversal over every node.
void walk(const ExprPtr& e, const std::function<void(const Expr&)>& fn);

// Prints the expression back as program text. Reparsing the result yields a
// structurally identical tree.
std::string to_text(const ExprPtr& e);

// Replaces free occurrences of Var(name) with `replacement` (used for
// binding --const values before translation).
ExprPtr substitute_var(const ExprPtr& e, const std::string& name, const ExprPtr& replacement);

}  // namespace lfppl

#endif
