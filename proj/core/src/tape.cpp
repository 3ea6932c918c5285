#include "lfppl/tape.hpp"

#include <cmath>
#include <limits>

#include "lfppl/errors.hpp"

namespace lfppl {

namespace {

// Tracks stack depth while emitting so the runtime buffer can be presized.
struct Emitter {
    std::vector<Tape::Instr>& code;
    const std::map<std::string, int>& slots;
    int depth = 0;
    size_t max_depth = 0;

    void push_depth() {
        ++depth;
        max_depth = std::max(max_depth, static_cast<size_t>(depth));
    }

    void emit(const SymPtr& e) {
        switch (e->kind) {
            case SymExpr::Kind::Lit:
                code.push_back({Tape::Op::Const, 0, e->value});
                push_depth();
                return;
            case SymExpr::Kind::Var: {
                auto it = slots.find(e->name);
                if (it == slots.end())
                    throw eval_error("unbound variable '" + e->name + "'");
                code.push_back({Tape::Op::Load, it->second, 0.0});
                push_depth();
                return;
            }
            case SymExpr::Kind::Apply: {
                switch (e->op) {
                    case SymOp::Add:
                    case SymOp::Mul: {
                        Tape::Op op = e->op == SymOp::Add ? Tape::Op::Add : Tape::Op::Mul;
                        emit(e->args[0]);
                        for (size_t i = 1; i < e->args.size(); ++i) {
                            emit(e->args[i]);
                            code.push_back({op, 0, 0.0});
                            --depth;
                        }
                        return;
                    }
                    case SymOp::Sub:
                    case SymOp::Div: {
                        emit(e->args[0]);
                        emit(e->args[1]);
                        code.push_back({e->op == SymOp::Sub ? Tape::Op::Sub : Tape::Op::Div, 0, 0.0});
                        --depth;
                        return;
                    }
                    case SymOp::Neg:
                    case SymOp::Exp:
                    case SymOp::Log:
                    case SymOp::Sqrt: {
                        emit(e->args[0]);
                        Tape::Op op = e->op == SymOp::Neg ? Tape::Op::Neg
                                    : e->op == SymOp::Exp ? Tape::Op::Exp
                                    : e->op == SymOp::Log ? Tape::Op::Log
                                                          : Tape::Op::Sqrt;
                        code.push_back({op, 0, 0.0});
                        return;
                    }
                }
                return;
            }
            case SymExpr::Kind::Piecewise: {
                emit(e->guard());
                size_t branch_at = code.size();
                code.push_back({Tape::Op::BranchGeq, 0, 0.0});
                --depth;
                emit(e->then_value());
                size_t jump_at = code.size();
                code.push_back({Tape::Op::Jump, 0, 0.0});
                --depth;  // only one branch runs
                code[branch_at].target = static_cast<int32_t>(code.size());
                emit(e->else_value());
                code[jump_at].target = static_cast<int32_t>(code.size());
                return;
            }
        }
    }
};

}  // namespace

Tape Tape::compile(const SymPtr& e, const std::map<std::string, int>& slots) {
    Tape tape;
    Emitter em{tape.code_, slots};
    em.emit(e);
    tape.max_stack_ = em.max_depth;
    return tape;
}

double Tape::run(const double* vars, std::vector<double>& stack) const {
    if (stack.size() < max_stack_) stack.resize(max_stack_);
    double* sp = stack.data();
    size_t pc = 0;
    const size_t n = code_.size();
    while (pc < n) {
        const Instr& in = code_[pc];
        switch (in.op) {
            case Op::Const:
                *sp++ = in.value;
                ++pc;
                break;
            case Op::Load:
                *sp++ = vars[in.target];
                ++pc;
                break;
            case Op::Add:
                sp[-2] += sp[-1];
                --sp;
                ++pc;
                break;
            case Op::Sub:
                sp[-2] -= sp[-1];
                --sp;
                ++pc;
                break;
            case Op::Mul:
                sp[-2] *= sp[-1];
                --sp;
                ++pc;
                break;
            case Op::Div:
                sp[-2] /= sp[-1];
                --sp;
                ++pc;
                break;
            case Op::Neg:
                sp[-1] = -sp[-1];
                ++pc;
                break;
            case Op::Exp:
                sp[-1] = std::exp(sp[-1]);
                ++pc;
                break;
            case Op::Log:
                sp[-1] = sp[-1] > 0.0 ? std::log(sp[-1])
                        : sp[-1] == 0.0
                            ? -std::numeric_limits<double>::infinity()
                            : std::numeric_limits<double>::quiet_NaN();
                ++pc;
                break;
            case Op::Sqrt:
                sp[-1] = sp[-1] >= 0.0 ? std::sqrt(sp[-1])
                                       : std::numeric_limits<double>::quiet_NaN();
                ++pc;
                break;
            case Op::BranchGeq: {
                double v = *--sp;
                pc = v >= 0.0 ? static_cast<size_t>(in.target) : pc + 1;
                break;
            }
            case Op::Jump:
                pc = static_cast<size_t>(in.target);
                break;
        }
    }
    return sp[-1];
}

}  // namespace lfppl
