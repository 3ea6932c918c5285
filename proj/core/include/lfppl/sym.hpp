#ifndef LFPPL_SYM_HPP
#define LFPPL_SYM_HPP

#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

namespace lfppl {

enum class SymOp { Add, Sub, Mul, Div, Neg, Exp, Log, Sqrt };

struct SymExpr;
using SymPtr = std::shared_ptr<const SymExpr>;

// Immutable symbolic expression over named reals. Apply nodes use the
// analytic primitives only; Add and Mul are n-ary and kept flattened.
// Piecewise selects `then` where guard < 0 and `else` where guard >= 0; it
// encodes branch-valued expressions and never carries probability mass
// itself.
struct SymExpr {
    enum class Kind { Var, Lit, Apply, Piecewise };

    Kind kind;
    std::string name;          // Var
    double value = 0.0;        // Lit
    SymOp op = SymOp::Add;     // Apply
    std::vector<SymPtr> args;  // Apply operands; Piecewise {guard, then, else}
    size_t hash = 0;

    const SymPtr& guard() const { return args[0]; }
    const SymPtr& then_value() const { return args[1]; }
    const SymPtr& else_value() const { return args[2]; }
};

// Builders. They fold literal operands, flatten nested sums/products, drop
// additive zeros and multiplicative ones, and absorb multiplicative zeros,
// so structurally equal results are produced for equal inputs.
SymPtr sym_var(std::string name);
SymPtr sym_lit(double value);
SymPtr sym_add(std::vector<SymPtr> args);
SymPtr sym_sub(SymPtr a, SymPtr b);
SymPtr sym_mul(std::vector<SymPtr> args);
SymPtr sym_div(SymPtr a, SymPtr b);
SymPtr sym_neg(SymPtr a);
SymPtr sym_exp(SymPtr a);
SymPtr sym_log(SymPtr a);
SymPtr sym_sqrt(SymPtr a);
SymPtr sym_apply(SymOp op, std::vector<SymPtr> args);
SymPtr sym_piecewise(SymPtr guard, SymPtr then_value, SymPtr else_value);

bool sym_equal(const SymPtr& a, const SymPtr& b);

bool is_lit(const SymPtr& e, double value);
bool contains_piecewise(const SymPtr& e);

std::set<std::string> sym_free_vars(const SymPtr& e);
void sym_free_vars_into(const SymPtr& e, std::set<std::string>& out);

// Replaces every occurrence of `var`; SymExpr has no binders, so capture
// cannot happen.
SymPtr sym_substitute(const SymPtr& target, const std::string& var, const SymPtr& replacement);

// Prefix s-expression rendering, e.g. "(* (- q z1) 2)".
std::string sym_to_string(const SymPtr& e);

// Strict numeric interpretation: unbound variables, log of a nonpositive,
// division by zero and sqrt of a negative all raise eval_error.
double eval_sym(const SymPtr& e, const std::map<std::string, double>& env);

}  // namespace lfppl

#endif
