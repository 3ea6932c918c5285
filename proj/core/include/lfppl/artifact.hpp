#ifndef LFPPL_ARTIFACT_HPP
#define LFPPL_ARTIFACT_HPP

#include <string>

#include "lfppl/quadruple.hpp"

namespace lfppl {

// Serializes a compiled quadruple: delta, gamma, D as {guards, density},
// F as {guards, density, value}, branch predicates and sample sites, with
// every expression rendered as a prefix s-expression.
std::string quadruple_to_json(const Quadruple& q, int indent = 2);

}  // namespace lfppl

#endif
