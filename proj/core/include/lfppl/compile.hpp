#ifndef LFPPL_COMPILE_HPP
#define LFPPL_COMPILE_HPP

#include <map>
#include <set>
#include <string>
#include <string_view>

#include "lfppl/ast.hpp"
#include "lfppl/quadruple.hpp"

namespace lfppl {

// Deterministic fresh-name source: z1, z2, ... in request order, skipping
// over names already taken by the program (collisions get a "$k" suffix).
class FreshNames {
public:
    explicit FreshNames(std::set<std::string> taken) : taken_(std::move(taken)) {}

    std::string next(const std::string& hint) {
        std::string base = hint + std::to_string(++counters_[hint]);
        if (taken_.insert(base).second) return base;
        for (int k = 1;; ++k) {
            std::string candidate = base + "$" + std::to_string(k);
            if (taken_.insert(candidate).second) return candidate;
        }
    }

private:
    std::set<std::string> taken_;
    std::map<std::string, int> counters_;
};

struct CompileOptions {
    // Values bound to free program variables before translation.
    std::map<std::string, double> constants;
};

// Translates a desugared core program into its quadruple by structural
// recursion. The program must be closed once `constants` are bound.
Quadruple translate(const Program& program, const CompileOptions& options = {});

// tokenize + parse + desugar + translate.
Quadruple compile_text(std::string_view source, const std::string& source_name = "<text>",
                       const CompileOptions& options = {});

struct Classification {
    std::vector<std::string> continuous;     // delta minus gamma, sorted
    std::vector<std::string> discontinuous;  // gamma, sorted
};

Classification classify_variables(const Quadruple& q);

// Case analysis of the outermost piecewise nodes: each result is a
// piecewise-free expression together with the guard conditions selecting
// it. Used wherever piecewise values must not enter indicator guards.
std::vector<std::pair<std::vector<Guard>, SymPtr>> expand_piecewise_value(const SymPtr& e);

}  // namespace lfppl

#endif
