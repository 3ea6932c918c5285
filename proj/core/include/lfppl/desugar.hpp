#ifndef LFPPL_DESUGAR_HPP
#define LFPPL_DESUGAR_HPP

#include "lfppl/ast.hpp"

namespace lfppl {

// Lowers a surface tree to the core language:
//   - multi-binding / multi-body lets become nested single lets, with fresh
//     throwaway binders for the non-final bodies;
//   - (max a b) becomes (if (< (- a b) 0) b a);
//   - (vector ...) bindings and (nth v k) with literal k are inlined;
//   - (sample (categorical [p1 ... pK])) becomes a uniform draw plus nested
//     ifs over the cumulative weights returning the 1-based category code;
//   - (sample (bernoulli p)) does the same with weights [1-p, p] returning
//     0/1; observing a bernoulli/categorical becomes a factor statement;
//   - a comparison (< a b) in value position becomes an if returning 1/0,
//     in predicate position it becomes the canonical difference form.
// Fresh binders never collide with identifiers already in the program.
ExprPtr desugar(const ExprPtr& surface);

// Checks that `e` contains only the core forms: Var, Const, PrimOp over the
// analytic primitives, single-binding/single-body Let, If with difference
// predicate, Sample of normal/uniform, Observe of normal/uniform/factor
// with a constant observed value. Throws parse_error otherwise.
void validate_core(const ExprPtr& e);

}  // namespace lfppl

#endif
