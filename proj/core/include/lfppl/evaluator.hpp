#ifndef LFPPL_EVALUATOR_HPP
#define LFPPL_EVALUATOR_HPP

#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "lfppl/quadruple.hpp"
#include "lfppl/tape.hpp"

namespace lfppl {

// Sorted name -> slot mapping over the sampled variables.
class VarIndex {
public:
    explicit VarIndex(std::vector<std::string> sorted_names);

    size_t size() const { return names_.size(); }
    const std::vector<std::string>& names() const { return names_; }
    int slot(const std::string& name) const;  // -1 when absent
    const std::map<std::string, int>& slots() const { return slots_; }

private:
    std::vector<std::string> names_;
    std::map<std::string, int> slots_;
};

// Assignment of one finite real to every sampled variable.
class State {
public:
    State(std::shared_ptr<const VarIndex> index, std::vector<double> values);

    // Validates that the map's domain is exactly the variable set and every
    // value is finite.
    static State from_map(std::shared_ptr<const VarIndex> index,
                          const std::map<std::string, double>& values);

    const std::vector<double>& values() const { return values_; }
    std::vector<double>& values() { return values_; }
    const VarIndex& index() const { return *index_; }
    std::shared_ptr<const VarIndex> index_ptr() const { return index_; }

    double at(const std::string& name) const;
    void set(const std::string& name, double value);
    std::map<std::string, double> to_map() const;

private:
    std::shared_ptr<const VarIndex> index_;
    std::vector<double> values_;
};

struct BranchingVector {
    std::vector<bool> bits;

    bool operator==(const BranchingVector& other) const { return bits == other.bits; }
    bool operator!=(const BranchingVector& other) const { return bits != other.bits; }
};

struct DensityReport {
    double log_density = 0.0;
    size_t active_d = 0;  // index of the single active density pair
    size_t active_f = 0;  // index of the single active factor triple
    BranchingVector branching;
};

// Prepared numeric view of a quadruple: guard atoms, log-density tapes and
// per-variable symbolic gradients, all immutable after construction and
// safe to share across chains.
class DensityEvaluator {
public:
    explicit DensityEvaluator(const Quadruple& q);

    const std::shared_ptr<const VarIndex>& index() const { return index_; }
    const Quadruple& quadruple() const { return *quad_; }

    // Log density at the state; -infinity inside zero-density regions.
    // First-match partition scan; use report() for the checked variant.
    double log_density(std::span<const double> values) const;

    // Potential energy U = -log density (+infinity at zero density).
    double potential(std::span<const double> values) const;

    // Full evaluation with the exactly-one-active-partition assertion.
    DensityReport report(const State& state) const;

    BranchingVector branching(std::span<const double> values) const;

    // Gradient of the log density with respect to the variables in `slots`,
    // treating indicator factors as constants. Zero-density states produce
    // a zero gradient here (the caller's acceptance test rejects them).
    void grad_log(std::span<const double> values, std::span<const int> slots,
                  std::span<double> out) const;

    // Checked variant. Unless `allow_discontinuous`, asks for a variable in
    // gamma fail; so do zero-density states.
    std::map<std::string, double> grad_log(const State& state,
                                           const std::vector<std::string>& wrt,
                                           bool allow_discontinuous = false) const;

    // Values of every expression whose sign selects a region (indicator
    // guards plus piecewise guards inside retained smooth terms). Used by
    // tests to keep finite-difference probes away from boundaries.
    std::vector<double> boundary_values(std::span<const double> values) const;

    struct PairGroupView {
        const uint64_t* masks;
        size_t count;
    };

private:
    // Guard requirements are packed as per-atom sign masks in one
    // contiguous array per group (stride words_, geq word then lt word):
    // a pair is active when every geq-masked atom is non-negative and
    // every lt-masked atom is negative.
    struct PairGroup {
        std::vector<uint64_t> masks;  // 2 * words_ per pair
        std::vector<bool> zero;
        std::vector<Tape> log_term;
        std::vector<std::vector<std::pair<int, Tape>>> grads;

        size_t size() const { return zero.size(); }
    };
    struct CaseInfo {
        std::vector<uint64_t> geq_mask;
        std::vector<uint64_t> lt_mask;
        Tape value;
    };
    struct PredicateInfo {
        std::vector<CaseInfo> cases;
    };

    void eval_atom_bits(std::span<const double> values, std::vector<uint64_t>& bits,
                        std::vector<double>& stack) const;
    size_t find_active(const PairGroup& group, const std::vector<uint64_t>& bits) const;

    std::shared_ptr<const Quadruple> quad_;
    std::shared_ptr<const VarIndex> index_;
    std::vector<Tape> atom_tapes_;
    std::vector<Tape> extra_boundary_tapes_;  // piecewise guards inside smooth terms
    size_t words_ = 0;
    PairGroup d_pairs_;
    PairGroup f_triples_;
    std::vector<PredicateInfo> predicates_;
};

// Convenience wrappers matching the one-shot call shape used in tests.
DensityReport eval_density(const Quadruple& q, const std::map<std::string, double>& state);
BranchingVector branching_vector(const Quadruple& q, const std::map<std::string, double>& state);
std::map<std::string, double> grad_log_density(const Quadruple& q,
                                               const std::map<std::string, double>& state,
                                               const std::vector<std::string>& wrt);

}  // namespace lfppl

#endif
