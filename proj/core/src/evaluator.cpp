#include "lfppl/evaluator.hpp"

#include <cmath>
#include <limits>
#include <unordered_map>

#include "lfppl/errors.hpp"
#include "lfppl/symdiff.hpp"

namespace lfppl {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

thread_local std::vector<double> tl_stack;
thread_local std::vector<uint64_t> tl_bits;

void collect_piecewise_guards(const SymPtr& e, std::vector<SymPtr>& out) {
    if (e->kind == SymExpr::Kind::Piecewise) out.push_back(e->guard());
    for (const auto& a : e->args) collect_piecewise_guards(a, out);
}

}  // namespace

VarIndex::VarIndex(std::vector<std::string> sorted_names) : names_(std::move(sorted_names)) {
    for (size_t i = 0; i < names_.size(); ++i) slots_[names_[i]] = static_cast<int>(i);
}

int VarIndex::slot(const std::string& name) const {
    auto it = slots_.find(name);
    return it == slots_.end() ? -1 : it->second;
}

State::State(std::shared_ptr<const VarIndex> index, std::vector<double> values)
    : index_(std::move(index)), values_(std::move(values)) {
    if (values_.size() != index_->size())
        throw eval_error("state has the wrong number of variables");
}

State State::from_map(std::shared_ptr<const VarIndex> index,
                      const std::map<std::string, double>& values) {
    if (values.size() != index->size())
        throw eval_error("state domain does not match the sampled variables");
    std::vector<double> flat(index->size());
    for (const auto& [name, value] : values) {
        int slot = index->slot(name);
        if (slot < 0) throw eval_error("state variable '" + name + "' is not sampled");
        if (!std::isfinite(value))
            throw eval_error("state variable '" + name + "' is not finite");
        flat[static_cast<size_t>(slot)] = value;
    }
    return State(std::move(index), std::move(flat));
}

double State::at(const std::string& name) const {
    int slot = index_->slot(name);
    if (slot < 0) throw eval_error("unknown state variable '" + name + "'");
    return values_[static_cast<size_t>(slot)];
}

void State::set(const std::string& name, double value) {
    int slot = index_->slot(name);
    if (slot < 0) throw eval_error("unknown state variable '" + name + "'");
    values_[static_cast<size_t>(slot)] = value;
}

std::map<std::string, double> State::to_map() const {
    std::map<std::string, double> out;
    for (size_t i = 0; i < index_->size(); ++i) out[index_->names()[i]] = values_[i];
    return out;
}

DensityEvaluator::DensityEvaluator(const Quadruple& q)
    : quad_(std::make_shared<Quadruple>(q)),
      index_(std::make_shared<VarIndex>(q.sorted_delta())) {
    const auto& slots = index_->slots();

    // Unique guard expressions become shared atoms; each state evaluation
    // computes one sign bit per atom, and pair activity reduces to a couple
    // of mask tests per word.
    std::unordered_map<size_t, std::vector<int>> buckets;
    std::vector<SymPtr> atom_exprs;
    auto intern_atom = [&](const SymPtr& expr) -> int {
        auto& bucket = buckets[expr->hash];
        for (int id : bucket)
            if (sym_equal(atom_exprs[static_cast<size_t>(id)], expr)) return id;
        int id = static_cast<int>(atom_exprs.size());
        atom_exprs.push_back(expr);
        bucket.push_back(id);
        return id;
    };

    auto intern_masks = [&](const IndicatorProduct& gate, std::vector<uint64_t>& geq,
                            std::vector<uint64_t>& lt) {
        for (const auto& g : gate.guards) {
            int id = intern_atom(g.expr);
            size_t word = static_cast<size_t>(id) / 64;
            uint64_t bit = uint64_t{1} << (static_cast<size_t>(id) % 64);
            if (word >= geq.size()) {
                geq.resize(word + 1, 0);
                lt.resize(word + 1, 0);
            }
            (g.rel == GuardRel::GeqZero ? geq : lt)[word] |= bit;
        }
    };

    struct RawPair {
        std::vector<uint64_t> geq;
        std::vector<uint64_t> lt;
        bool zero;
        SymPtr term;
    };
    // words_ is final once every guard atom has been interned.
    auto build_group = [&](const std::vector<RawPair>& raw, PairGroup& group) {
        for (const auto& r : raw) {
            for (size_t w = 0; w < words_; ++w) {
                group.masks.push_back(w < r.geq.size() ? r.geq[w] : 0);
                group.masks.push_back(w < r.lt.size() ? r.lt[w] : 0);
            }
            group.zero.push_back(r.zero);
            group.grads.emplace_back();
            if (r.zero) {
                group.log_term.emplace_back();
                continue;
            }
            SymPtr log_term = log_transform(r.term);
            group.log_term.push_back(Tape::compile(log_term, slots));
            for (const auto& name : index_->names()) {
                SymPtr d = differentiate(log_term, name);
                if (is_lit(d, 0.0)) continue;
                group.grads.back().emplace_back(index_->slot(name), Tape::compile(d, slots));
            }
        }
    };

    std::vector<RawPair> raw_d;
    for (const auto& p : quad_->density_pairs) {
        RawPair r{{}, {}, is_lit(p.k, 0.0), p.k};
        intern_masks(p.eta, r.geq, r.lt);
        raw_d.push_back(std::move(r));
    }
    std::vector<RawPair> raw_f;
    for (const auto& f : quad_->factor_triples) {
        RawPair r{{}, {}, is_lit(f.l, 0.0), f.l};
        intern_masks(f.zeta, r.geq, r.lt);
        raw_f.push_back(std::move(r));
    }

    for (const auto& pred : quad_->branch_predicates) {
        PredicateInfo info;
        for (const auto& c : pred.cases) {
            CaseInfo ci;
            intern_masks(c.guards, ci.geq_mask, ci.lt_mask);
            ci.value = Tape::compile(c.expr, slots);
            info.cases.push_back(std::move(ci));
        }
        predicates_.push_back(std::move(info));
    }

    for (const auto& expr : atom_exprs) atom_tapes_.push_back(Tape::compile(expr, slots));
    words_ = std::max(words_, (atom_tapes_.size() + 63) / 64);
    build_group(raw_d, d_pairs_);
    build_group(raw_f, f_triples_);
    for (auto& pred : predicates_) {
        for (auto& c : pred.cases) {
            c.geq_mask.resize(words_, 0);
            c.lt_mask.resize(words_, 0);
        }
    }

    // Piecewise guards hiding inside retained smooth terms are boundaries
    // too, even though no indicator names them.
    std::vector<SymPtr> pw_guards;
    for (const auto& p : quad_->density_pairs) collect_piecewise_guards(p.k, pw_guards);
    for (const auto& f : quad_->factor_triples) collect_piecewise_guards(f.l, pw_guards);
    std::unordered_map<size_t, std::vector<int>> seen;
    std::vector<SymPtr> unique_pw;
    for (const auto& g : pw_guards) {
        bool dup = false;
        for (int id : seen[g->hash])
            if (sym_equal(unique_pw[static_cast<size_t>(id)], g)) dup = true;
        if (dup) continue;
        seen[g->hash].push_back(static_cast<int>(unique_pw.size()));
        unique_pw.push_back(g);
        extra_boundary_tapes_.push_back(Tape::compile(g, slots));
    }
}

// Sign bit per atom: set when the atom value is >= 0.
void DensityEvaluator::eval_atom_bits(std::span<const double> values,
                                      std::vector<uint64_t>& bits,
                                      std::vector<double>& stack) const {
    bits.assign(words_, 0);
    for (size_t i = 0; i < atom_tapes_.size(); ++i) {
        if (atom_tapes_[i].run(values.data(), stack) >= 0.0)
            bits[i / 64] |= uint64_t{1} << (i % 64);
    }
}

namespace {

bool case_satisfied(const std::vector<uint64_t>& geq_mask, const std::vector<uint64_t>& lt_mask,
                    const std::vector<uint64_t>& bits) {
    for (size_t w = 0; w < bits.size(); ++w)
        if ((geq_mask[w] & ~bits[w]) | (lt_mask[w] & bits[w])) return false;
    return true;
}

}  // namespace

size_t DensityEvaluator::find_active(const PairGroup& group,
                                     const std::vector<uint64_t>& bits) const {
    const uint64_t* masks = group.masks.data();
    const size_t n = group.size();
    if (words_ == 1) {
        uint64_t b = bits[0];
        for (size_t i = 0; i < n; ++i) {
            if (!((masks[2 * i] & ~b) | (masks[2 * i + 1] & b))) return i;
        }
        return SIZE_MAX;
    }
    for (size_t i = 0; i < n; ++i) {
        const uint64_t* m = masks + 2 * words_ * i;
        bool ok = true;
        for (size_t w = 0; w < words_; ++w)
            if ((m[2 * w] & ~bits[w]) | (m[2 * w + 1] & bits[w])) {
                ok = false;
                break;
            }
        if (ok) return i;
    }
    return SIZE_MAX;
}

double DensityEvaluator::log_density(std::span<const double> values) const {
    eval_atom_bits(values, tl_bits, tl_stack);
    size_t d = find_active(d_pairs_, tl_bits);
    size_t f = find_active(f_triples_, tl_bits);
    if (d == SIZE_MAX || f == SIZE_MAX) return -kInf;
    if (d_pairs_.zero[d] || f_triples_.zero[f]) return -kInf;
    return d_pairs_.log_term[d].run(values.data(), tl_stack) +
           f_triples_.log_term[f].run(values.data(), tl_stack);
}

double DensityEvaluator::potential(std::span<const double> values) const {
    return -log_density(values);
}

namespace {

size_t checked_unique_active(const DensityEvaluator::PairGroupView& view,
                             const std::vector<uint64_t>& bits, size_t words,
                             const char* what) {
    size_t active = SIZE_MAX;
    for (size_t i = 0; i < view.count; ++i) {
        const uint64_t* m = view.masks + 2 * words * i;
        bool ok = true;
        for (size_t w = 0; w < words; ++w)
            if ((m[2 * w] & ~bits[w]) | (m[2 * w + 1] & bits[w])) {
                ok = false;
                break;
            }
        if (!ok) continue;
        if (active != SIZE_MAX)
            throw eval_error(std::string("two ") + what + " partitions active at one state (" +
                             std::to_string(active) + " and " + std::to_string(i) + ")");
        active = i;
    }
    if (active == SIZE_MAX)
        throw eval_error(std::string("no active ") + what +
                         " partition at state (partition does not cover)");
    return active;
}

}  // namespace

DensityReport DensityEvaluator::report(const State& state) const {
    std::span<const double> values(state.values());
    eval_atom_bits(values, tl_bits, tl_stack);

    size_t active_d = checked_unique_active({d_pairs_.masks.data(), d_pairs_.size()}, tl_bits,
                                            words_, "density");
    size_t active_f = checked_unique_active({f_triples_.masks.data(), f_triples_.size()},
                                            tl_bits, words_, "factor");

    DensityReport r;
    r.active_d = active_d;
    r.active_f = active_f;
    if (d_pairs_.zero[active_d] || f_triples_.zero[active_f]) {
        r.log_density = -kInf;
    } else {
        r.log_density = d_pairs_.log_term[active_d].run(values.data(), tl_stack) +
                        f_triples_.log_term[active_f].run(values.data(), tl_stack);
    }
    r.branching = branching(values);
    return r;
}

BranchingVector DensityEvaluator::branching(std::span<const double> values) const {
    eval_atom_bits(values, tl_bits, tl_stack);
    BranchingVector bv;
    bv.bits.reserve(predicates_.size());
    for (const auto& pred : predicates_) {
        bool bit = false;
        bool found = false;
        for (const auto& c : pred.cases) {
            if (!case_satisfied(c.geq_mask, c.lt_mask, tl_bits)) continue;
            bit = c.value.run(values.data(), tl_stack) < 0.0;
            found = true;
            break;
        }
        if (!found) throw eval_error("no active case for a branch predicate");
        bv.bits.push_back(bit);
    }
    return bv;
}

void DensityEvaluator::grad_log(std::span<const double> values, std::span<const int> slots,
                                std::span<double> out) const {
    for (auto& g : out) g = 0.0;
    eval_atom_bits(values, tl_bits, tl_stack);
    for (const PairGroup* group : {&d_pairs_, &f_triples_}) {
        size_t active = find_active(*group, tl_bits);
        if (active == SIZE_MAX || group->zero[active]) continue;
        for (const auto& [slot, tape] : group->grads[active]) {
            for (size_t i = 0; i < slots.size(); ++i) {
                if (slots[i] == slot) {
                    out[i] += tape.run(values.data(), tl_stack);
                    break;
                }
            }
        }
    }
}

std::map<std::string, double> DensityEvaluator::grad_log(const State& state,
                                                         const std::vector<std::string>& wrt,
                                                         bool allow_discontinuous) const {
    std::vector<int> slots;
    for (const auto& name : wrt) {
        if (!allow_discontinuous && quad_->in_gamma(name))
            throw eval_error("variable '" + name +
                             "' is discontinuity-marked; no gradient is defined for it");
        int slot = index_->slot(name);
        if (slot < 0) throw eval_error("unknown variable '" + name + "'");
        slots.push_back(slot);
    }
    if (std::isinf(log_density(state.values())))
        throw eval_error("gradient requested at a zero-density state");
    std::vector<double> out(slots.size());
    grad_log(state.values(), slots, out);
    std::map<std::string, double> result;
    for (size_t i = 0; i < wrt.size(); ++i) result[wrt[i]] = out[i];
    return result;
}

std::vector<double> DensityEvaluator::boundary_values(std::span<const double> values) const {
    std::vector<double> out;
    out.reserve(atom_tapes_.size() + extra_boundary_tapes_.size());
    for (const auto& t : atom_tapes_) out.push_back(t.run(values.data(), tl_stack));
    for (const auto& t : extra_boundary_tapes_) out.push_back(t.run(values.data(), tl_stack));
    return out;
}

DensityReport eval_density(const Quadruple& q, const std::map<std::string, double>& state) {
    DensityEvaluator ev(q);
    return ev.report(State::from_map(ev.index(), state));
}

BranchingVector branching_vector(const Quadruple& q, const std::map<std::string, double>& state) {
    DensityEvaluator ev(q);
    State s = State::from_map(ev.index(), state);
    return ev.branching(s.values());
}

std::map<std::string, double> grad_log_density(const Quadruple& q,
                                               const std::map<std::string, double>& state,
                                               const std::vector<std::string>& wrt) {
    DensityEvaluator ev(q);
    return ev.grad_log(State::from_map(ev.index(), state), wrt, /*allow_discontinuous=*/false);
}

}  // namespace lfppl
