#pragma once

// Logical side: value assignments to observables (elements of reality)
// grown by the locality-and-reality rule, contradiction search, exhaustive
// local-hidden-variable search, and the four-qubit GHZ constraint family.

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "nlab/chains.hpp"
#include "nlab/correlation_engine.hpp"

namespace nlab {

/// Joint outcome of several observables that never occurs.
struct ExclusionConstraint {
    std::vector<std::size_t> observables;
    std::vector<std::uint8_t> forbidden;
};

/// Binary correlations (closed under duality when the caller wants value-0
/// propagation) plus exclusion constraints over the same observable list.
struct ConstraintSystem {
    CorrelationSet correlations;
    std::vector<ExclusionConstraint> exclusions;

    const std::vector<LocalObservable> &observables() const { return correlations.observables(); }
    std::size_t size() const { return observables().size(); }
};

enum class Rule : std::uint8_t {
    Seed,        ///< value assumed for the target observable
    Branch,      ///< case split on an element of reality
    Complement,  ///< 1 - S takes the opposite value of S
    Correlation, ///< source = 1 forces target = 1
    Exclusion,   ///< all but one member match the forbidden tuple
};

const char *rule_name(Rule r);

struct Step {
    Rule rule = Rule::Seed;
    std::size_t observable = 0;
    std::uint8_t value = 0;
    /// link index, exclusion index or complement source; unused for Seed/Branch
    std::size_t source = 0;
};

/// Partial {0,1} assignment with the step that justified each value.
class RealityLedger {
  public:
    explicit RealityLedger(std::size_t n_observables);

    std::size_t size() const { return values_.size(); }
    std::optional<std::uint8_t> value(std::size_t observable) const;
    const std::optional<Step> &provenance(std::size_t observable) const;
    const std::vector<Step> &trace() const { return trace_; }
    std::size_t assigned_count() const;

    enum class Outcome { Added, AlreadyKnown, Clash };

    /// Records the step unless the observable already holds a value. A
    /// different existing value is reported as Clash and left untouched.
    Outcome record(const Step &step);

  private:
    std::vector<std::optional<std::uint8_t>> values_;
    std::vector<std::optional<Step>> provenance_;
    std::vector<Step> trace_;
};

/// Propagation stopped because `attempted` contradicts an existing value.
struct PropagationConflict {
    std::size_t observable = 0;
    Step attempted;
    std::vector<Step> trace;
};

using PropagationResult = std::variant<RealityLedger, PropagationConflict>;

/// Ledger with `value` seeded on `observable` (and its complement, if present).
PropagationResult seeded(const ConstraintSystem &system, std::size_t observable, std::uint8_t value);

/**
 * Fixpoint of the inference rules: a correlation source with value 1 gives
 * its target value 1; an exclusion constraint with all but one member
 * matching its forbidden tuple gives the last member the other value; each
 * value is mirrored onto the complement observable. Rounds that add values
 * are counted into `rounds` when given.
 */
PropagationResult propagate(RealityLedger ledger, const ConstraintSystem &system,
                            std::size_t *rounds = nullptr);

/// Case-split tree whose every leaf ends in a clash.
struct RefutationNode {
    std::vector<Step> steps;
    std::optional<Step> conflict;
    std::optional<std::size_t> split_on;
    /// children[v] continues with split_on = v
    std::vector<RefutationNode> children;
};

struct Refutation {
    std::size_t observable = 0;
    std::uint8_t seed_value = 0;
    RefutationNode root;
};

/// Refutes `observable = value`, or returns nullopt when a consistent
/// completion exists. Elements of reality that appear in constraints are
/// split on when propagation alone stalls.
std::optional<Refutation> refute(const ConstraintSystem &system, std::size_t observable, std::uint8_t value);

/// Both values of one observable are refuted: S → 1 - S and 1 - S → S.
struct Contradiction {
    std::size_t observable = 0;
    Refutation one_forces_zero;
    Refutation zero_forces_one;

    /// "S → 1-S" and "1-S → S" rendered with observable labels.
    std::vector<std::string> derived_correlations(const ConstraintSystem &system) const;
};

std::optional<Contradiction> derive_contradiction(const ConstraintSystem &system, std::size_t target);

/// Re-checks every step of a refutation against the system's rules.
bool replay(const ConstraintSystem &system, const Refutation &r);

/// Upper bound on independent observables for lhv_search.
inline constexpr std::size_t kMaxLhvObservables = 24;

/**
 * All deterministic assignments that violate no correlation or exclusion.
 * Complements are tied to their observable, so only one member of each
 * complementary pair is enumerated. Throws InvalidArgument when more than
 * kMaxLhvObservables independent observables remain.
 */
std::vector<std::vector<std::uint8_t>> lhv_search(const ConstraintSystem &system);

/// Zero-probability outcome tuples of ψ over one observable per party,
/// for every combination of the given directions.
ConstraintSystem exclusion_constraints(const StateVector &psi,
                                       const std::vector<std::vector<Direction>> &directions_per_party,
                                       double tol = 1e-12);

struct GhszSystem {
    StateVector psi;
    ConstraintSystem system;
    /// index of the first party's x-spin observable, n0 = (1, 0, 0)
    std::size_t target = 0;
};

/// (|0000> + |1111>)/sqrt 2 with x and y spin observables on each party.
GhszSystem ghsz_correlations();

} // namespace nlab
