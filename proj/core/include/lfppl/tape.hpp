#ifndef LFPPL_TAPE_HPP
#define LFPPL_TAPE_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "lfppl/sym.hpp"

namespace lfppl {

// Flat stack-machine form of a SymExpr for repeated numeric evaluation.
// Piecewise nodes compile to conditional jumps, so only the selected branch
// runs. Density-mode semantics: log(0) yields -infinity and domain errors
// yield NaN, both of which propagate instead of throwing.
class Tape {
public:
    enum class Op : uint8_t {
        Const, Load, Add, Sub, Mul, Div, Neg, Exp, Log, Sqrt,
        BranchGeq,  // pop; jump to `target` when the value is >= 0
        Jump,
    };

    struct Instr {
        Op op;
        int32_t target = 0;  // Load slot or jump target
        double value = 0.0;  // Const payload
    };

    static Tape compile(const SymPtr& e, const std::map<std::string, int>& slots);

    double run(const double* vars, std::vector<double>& stack) const;

    size_t size() const { return code_.size(); }

private:
    std::vector<Instr> code_;
    size_t max_stack_ = 0;
};

}  // namespace lfppl

#endif
