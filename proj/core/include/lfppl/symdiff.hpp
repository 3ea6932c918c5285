#ifndef LFPPL_SYMDIFF_HPP
#define LFPPL_SYMDIFF_HPP

#include "lfppl/sym.hpp"

namespace lfppl {

// Partial derivative of `e` with respect to `var`. Piecewise nodes
// differentiate branch-wise (valid away from their guard boundaries).
SymPtr differentiate(const SymPtr& e, const std::string& var);

// Rewrites log(e) structurally: products become sums of logs, quotients
// become differences, exp unwraps, sqrt halves, piecewise maps into both
// branches. Evaluating the result never multiplies densities in linear
// space, so long factor products cannot underflow.
SymPtr log_transform(const SymPtr& e);

// Simultaneous substitution (placeholders substituted in one pass, so a
// replacement expression can mention another placeholder's name safely).
SymPtr sym_substitute_many(const SymPtr& target, const std::map<std::string, SymPtr>& subs);

}  // namespace lfppl

#endif
