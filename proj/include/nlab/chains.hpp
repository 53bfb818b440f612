#pragma once

// Chains ("ladders") of two-party correlations
//   S1(m1) → S2(m2) → S1(m3) → …
// the correlation sets they live in, and the numerical check that closing a
// chain back onto the complement of its head forces the head to annihilate
// every admissible state.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "nlab/correlation_engine.hpp"
#include "nlab/sampling.hpp"

namespace nlab {

/// Ordered sequence of two-qubit local observables with alternating parties.
/// Positions are 1-based throughout.
class Chain {
  public:
    /// Throws InvalidArgument for an empty list, observables that are not
    /// two-party, or two neighbours on the same party.
    explicit Chain(std::vector<LocalObservable> observables);

    std::size_t size() const { return observables_.size(); }
    const LocalObservable &at(std::size_t position) const;
    const std::vector<LocalObservable> &observables() const { return observables_; }
    int head_party() const { return observables_.front().party(); }

    /// Correlation between positions p and p + 1.
    Correlation link(std::size_t position) const;
    std::vector<Correlation> links() const;

    /// i(j) = (3 - (-1)^j) / 2: party of position j + 1 in a chain headed by party 1.
    static int party_index(std::size_t j) { return j % 2 == 0 ? 1 : 2; }

  private:
    std::vector<LocalObservable> observables_;
};

/// Grows a chain of `length` observables from `head` by repeated partner
/// construction on ψ. Throws PreconditionError if a link's source annihilates ψ.
Chain build_chain(const StateVector &psi, const LocalObservable &head, std::size_t length,
                  double tol = kCorrelationTol);

/// holds() for every adjacent pair.
bool verify_chain(const Chain &c, const StateVector &psi, double tol = kCorrelationTol);

/// Nonvanishing propagation along a verified chain: true iff every member
/// acts nontrivially on ψ (norm > tol). Throws PreconditionError when the
/// chain does not hold on ψ or its head annihilates ψ.
bool lemma1_check(const Chain &c, const StateVector &psi, double tol = kCorrelationTol);

/// Within a chain the only derivable correlations run forward: i <= j.
/// Throws std::out_of_range for positions outside [1, size].
bool r2_derivable(const Chain &c, std::size_t i, std::size_t j);

struct CorrelationLink {
    std::size_t source = 0;
    std::size_t target = 0;
    bool operator==(const CorrelationLink &) const = default;
};

/// Observables plus directed correlations between them, by index.
/// Observables are deduplicated with same_observable().
class CorrelationSet {
  public:
    explicit CorrelationSet(int n_parties = 2);

    int n_parties() const { return n_parties_; }

    /// Index of an equal observable, adding it when absent.
    std::size_t add_observable(const LocalObservable &o);
    std::optional<std::size_t> find(const LocalObservable &o) const;

    /// Adds the link if not already present. Throws InvalidArgument when
    /// both ends are on the same party or an index is out of range.
    void add_link(std::size_t source, std::size_t target);
    void add(const Correlation &c);

    const std::vector<LocalObservable> &observables() const { return observables_; }
    const std::vector<CorrelationLink> &links() const { return links_; }
    bool contains(const CorrelationLink &l) const;

    Correlation correlation(std::size_t link_index) const;
    std::vector<Correlation> correlations() const;

    /// Index of 1 - P on the same party, when that observable is in the set.
    std::optional<std::size_t> complement_of(std::size_t index) const;

    /// Link of the dual correlation, when both complements are present.
    std::optional<CorrelationLink> dual_link(const CorrelationLink &l) const;

    /// Every link's dual is present.
    bool is_closed() const;

    /// Copy with complements and dual links added.
    CorrelationSet closed() const;

  private:
    int n_parties_;
    std::vector<LocalObservable> observables_;
    std::vector<CorrelationLink> links_;
};

/**
 * The unique maximal chain of `b` through `start`, grown forwards along
 * outgoing links and backwards along incoming ones.
 *
 * Preconditions (PreconditionError): start is in b, start acts nontrivially
 * on ψ, and every link touched holds on ψ. Two distinct partners for one
 * observable make the set inconsistent with partner uniqueness and raise
 * PreconditionError as well. An observable without links yields a chain of
 * length one. Growth stops when it would revisit an observable.
 */
Chain maximal_chain(const CorrelationSet &b, const LocalObservable &start, const StateVector &psi,
                    double tol = kCorrelationTol);

struct CascadeIdentity {
    std::size_t j = 0;
    std::size_t left = 0;  ///< position 1 + j
    std::size_t right = 0; ///< position 2k + 1 - j
    /// ||P_left - (1 - P_right)||_F on the chain as given
    double residual = 0.0;
};

struct Prop2Report {
    std::size_t k = 0;
    /// dimension of the states satisfying chain links plus closure
    std::size_t solution_dim = 0;
    /// max ||S(head) v|| over the orthonormal solution basis
    double max_head_norm = 0.0;
    /// max_head_norm <= tol
    bool head_annihilates = true;
    /// ||P_1 - (1 - P_{2k+1})||_F, the identity forced on the closure partner
    double closure_identity_residual = 0.0;
    /// identities P_{1+j} = 1 - P_{2k+1-j} for j = 1..2k
    std::vector<CascadeIdentity> cascade;
    /// j = k case, P = 1 - P at position k + 1: ||2P - 1||_F (sqrt 2 for rank one)
    std::size_t impossible_position = 0;
    double impossible_residual = 0.0;
};

/// Correlations of a closed chain: every link plus S(2k) → 1 - S(1).
std::vector<Correlation> closed_chain_correlations(const Chain &c, std::size_t k);

/// Solves for all states obeying the closed chain and reports how the head
/// acts on them, together with the identity cascade that the closure would
/// force on a state with nonvanishing head. Throws PreconditionError unless
/// k >= 1, the head is on party 1 and size() >= 2k + 1.
Prop2Report prop2_verify(const Chain &c, std::size_t k, double tol = kCorrelationTol);

struct ClosureForcing {
    /// partner of S(2k) on ψ, which uniqueness says is P_{2k+1}
    Projector forced_partner;
    /// ||forced - P_{2k+1}||_F
    double partner_residual = 0.0;
    /// ||forced - (1 - P_1)||_F: nonzero means the closure cannot hold on ψ
    double closure_residual = 0.0;
    bool closure_holds = false;
    bool contradiction = false;
};

/// Follows the closure step on a concrete state whose head does not vanish.
/// Throws PreconditionError when the chain fails on ψ or the head annihilates ψ.
ClosureForcing closure_forcing(const Chain &c, std::size_t k, const StateVector &psi,
                               double tol = kCorrelationTol);

struct RandomChain {
    StateVector psi;
    Chain chain;
};

/// Haar state and uniform head direction on party 1, redrawn until every
/// partner exists; the chain holds on psi by construction.
RandomChain random_chain(Rng &rng, std::size_t length, double tol = kCorrelationTol);

struct Prop2Sweep {
    std::size_t k = 0;
    std::size_t trials = 0;
    std::size_t annihilated = 0;
    double max_head_norm = 0.0;
    double max_impossible_residual_error = 0.0; ///< max | ||2P-1|| - sqrt 2 |
    /// solution_dim_histogram[d] = trials whose solution space had dimension d
    std::vector<std::size_t> solution_dim_histogram;
};

/// prop2_verify over `trials` random closed chains of length 2k + 1.
Prop2Sweep prop2_sweep(std::size_t k, std::size_t trials, std::uint64_t seed, double tol = kCorrelationTol);

} // namespace nlab
