#include "nlab/chains.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numbers>
#include <stdexcept>

#include "nlab/errors.hpp"
#include "nlab/parallel.hpp"

namespace nlab {

Chain::Chain(std::vector<LocalObservable> observables) : observables_(std::move(observables)) {
    if (observables_.empty()) {
        throw InvalidArgument("a chain needs at least one observable");
    }
    for (std::size_t p = 0; p < observables_.size(); ++p) {
        if (observables_[p].n_parties() != 2) {
            throw InvalidArgument("chains are defined on two-party registers");
        }
        if (p > 0 && observables_[p].party() == observables_[p - 1].party()) {
            throw InvalidArgument("chain parties must alternate");
        }
    }
}

const LocalObservable &Chain::at(std::size_t position) const {
    if (position < 1 || position > observables_.size()) {
        throw std::out_of_range("chain position " + std::to_string(position) + " out of range");
    }
    return observables_[position - 1];
}

Correlation Chain::link(std::size_t position) const { return Correlation(at(position), at(position + 1)); }

std::vector<Correlation> Chain::links() const {
    std::vector<Correlation> out;
    for (std::size_t p = 1; p < size(); ++p) {
        out.push_back(link(p));
    }
    return out;
}

Chain build_chain(const StateVector &psi, const LocalObservable &head, std::size_t length, double tol) {
    if (length == 0) {
        throw InvalidArgument("chain length must be positive");
    }
    std::vector<LocalObservable> obs{head};
    while (obs.size() < length) {
        obs.push_back(partner_observable(psi, obs.back(), tol));
    }
    return Chain(std::move(obs));
}

bool verify_chain(const Chain &c, const StateVector &psi, double tol) {
    for (std::size_t p = 1; p < c.size(); ++p) {
        if (!holds(c.link(p), psi, tol)) {
            return false;
        }
    }
    return true;
}

bool lemma1_check(const Chain &c, const StateVector &psi, double tol) {
    if (!verify_chain(c, psi, tol)) {
        throw PreconditionError("chain correlations do not hold on the state");
    }
    if (action_norm(c.at(1), psi) <= tol) {
        throw PreconditionError("chain head annihilates the state");
    }
    return std::all_of(c.observables().begin(), c.observables().end(),
                       [&](const LocalObservable &o) { return action_norm(o, psi) > tol; });
}

bool r2_derivable(const Chain &c, std::size_t i, std::size_t j) {
    if (i < 1 || j < 1 || i > c.size() || j > c.size()) {
        throw std::out_of_range("chain position out of range");
    }
    return i <= j;
}

CorrelationSet::CorrelationSet(int n_parties) : n_parties_(n_parties) {
    if (n_parties < 2) {
        throw InvalidArgument("correlation sets need at least two parties");
    }
}

std::size_t CorrelationSet::add_observable(const LocalObservable &o) {
    if (o.n_parties() != n_parties_) {
        throw DimensionError("observable party count differs from the correlation set");
    }
    if (auto idx = find(o)) {
        return *idx;
    }
    observables_.push_back(o);
    return observables_.size() - 1;
}

std::optional<std::size_t> CorrelationSet::find(const LocalObservable &o) const {
    for (std::size_t i = 0; i < observables_.size(); ++i) {
        if (same_observable(observables_[i], o)) {
            return i;
        }
    }
    return std::nullopt;
}

void CorrelationSet::add_link(std::size_t source, std::size_t target) {
    if (source >= observables_.size() || target >= observables_.size()) {
        throw InvalidArgument("correlation refers to an unknown observable");
    }
    if (observables_[source].party() == observables_[target].party()) {
        throw InvalidArgument("correlation needs observables on different parties");
    }
    const CorrelationLink l{source, target};
    if (!contains(l)) {
        links_.push_back(l);
    }
}

void CorrelationSet::add(const Correlation &c) {
    const auto s = add_observable(c.source());
    const auto t = add_observable(c.target());
    add_link(s, t);
}

bool CorrelationSet::contains(const CorrelationLink &l) const {
    return std::find(links_.begin(), links_.end(), l) != links_.end();
}

Correlation CorrelationSet::correlation(std::size_t link_index) const {
    const auto &l = links_.at(link_index);
    return Correlation(observables_[l.source], observables_[l.target]);
}

std::vector<Correlation> CorrelationSet::correlations() const {
    std::vector<Correlation> out;
    for (std::size_t i = 0; i < links_.size(); ++i) {
        out.push_back(correlation(i));
    }
    return out;
}

std::optional<std::size_t> CorrelationSet::complement_of(std::size_t index) const {
    return find(observables_.at(index).complement());
}

std::optional<CorrelationLink> CorrelationSet::dual_link(const CorrelationLink &l) const {
    const auto s = complement_of(l.target);
    const auto t = complement_of(l.source);
    if (!s || !t) {
        return std::nullopt;
    }
    return CorrelationLink{*s, *t};
}

bool CorrelationSet::is_closed() const {
    return std::all_of(links_.begin(), links_.end(), [&](const CorrelationLink &l) {
        const auto d = dual_link(l);
        return d && contains(*d);
    });
}

CorrelationSet CorrelationSet::closed() const {
    CorrelationSet out = *this;
    for (std::size_t i = 0; i < observables_.size(); ++i) {
        out.add_observable(observables_[i].complement());
    }
    for (const auto &l : links_) {
        const auto d = *out.dual_link(l);
        out.add_link(d.source, d.target);
    }
    return out;
}

Chain maximal_chain(const CorrelationSet &b, const LocalObservable &start, const StateVector &psi,
                    double tol) {
    const auto start_idx = b.find(start);
    if (!start_idx) {
        throw PreconditionError("start observable is not part of the correlation set");
    }
    if (action_norm(start, psi) <= tol) {
        throw PreconditionError("start observable annihilates the state");
    }

    auto unique_neighbour = [&](std::size_t at, bool forward) -> std::optional<std::size_t> {
        std::optional<std::size_t> found;
        for (std::size_t li = 0; li < b.links().size(); ++li) {
            const auto &l = b.links()[li];
            const std::size_t from = forward ? l.source : l.target;
            const std::size_t to = forward ? l.target : l.source;
            if (from != at) {
                continue;
            }
            if (!holds(b.correlation(li), psi, tol)) {
                throw PreconditionError("correlation " + b.observables()[l.source].label() + " -> " +
                                        b.observables()[l.target].label() + " does not hold on the state");
            }
            if (found && *found != to) {
                throw PreconditionError("partner not unique: " + b.observables()[at].label() +
                                        " has two distinct partners, inconsistent input set");
            }
            found = to;
        }
        return found;
    };

    std::deque<std::size_t> members{*start_idx};
    auto seen = [&](std::size_t i) { return std::find(members.begin(), members.end(), i) != members.end(); };
    for (auto next = unique_neighbour(members.back(), true); next && !seen(*next);
         next = unique_neighbour(members.back(), true)) {
        members.push_back(*next);
    }
    for (auto prev = unique_neighbour(members.front(), false); prev && !seen(*prev);
         prev = unique_neighbour(members.front(), false)) {
        members.push_front(*prev);
    }

    std::vector<LocalObservable> obs;
    for (auto i : members) {
        obs.push_back(b.observables()[i]);
    }
    return Chain(std::move(obs));
}

std::vector<Correlation> closed_chain_correlations(const Chain &c, std::size_t k) {
    auto out = c.links();
    out.emplace_back(c.at(2 * k), c.at(1).complement());
    return out;
}

Prop2Report prop2_verify(const Chain &c, std::size_t k, double tol) {
    if (k < 1) {
        throw PreconditionError("closure index k must be at least 1");
    }
    if (c.head_party() != 1) {
        throw PreconditionError("closed chains must be headed by party 1");
    }
    if (c.size() < 2 * k + 1) {
        throw PreconditionError("chain shorter than 2k + 1");
    }

    Prop2Report report;
    report.k = k;
    const auto rs = closed_chain_correlations(c, k);
    const auto basis = solution_space(rs, 2, tol);
    report.solution_dim = basis.size();
    for (const auto &v : basis) {
        report.max_head_norm = std::max(report.max_head_norm, action_norm(c.at(1).embedded(), v));
    }
    report.head_annihilates = report.max_head_norm <= tol;

    auto complement_gap = [&](std::size_t left, std::size_t right) {
        const CMatrix &pl = c.at(left).projector().matrix();
        const CMatrix &pr = c.at(right).projector().matrix();
        return frobenius(pl - (identity(2) - pr));
    };
    report.closure_identity_residual = complement_gap(1, 2 * k + 1);
    for (std::size_t j = 1; j <= 2 * k; ++j) {
        report.cascade.push_back({j, 1 + j, 2 * k + 1 - j, complement_gap(1 + j, 2 * k + 1 - j)});
    }
    report.impossible_position = k + 1;
    const CMatrix &p = c.at(k + 1).projector().matrix();
    report.impossible_residual = frobenius(2.0 * p - identity(2));
    return report;
}

ClosureForcing closure_forcing(const Chain &c, std::size_t k, const StateVector &psi, double tol) {
    if (k < 1 || c.size() < 2 * k + 1 || c.head_party() != 1) {
        throw PreconditionError("closure needs a party-1 headed chain of length >= 2k + 1");
    }
    if (!verify_chain(c, psi, tol)) {
        throw PreconditionError("chain correlations do not hold on the state");
    }
    if (action_norm(c.at(1), psi) <= tol) {
        throw PreconditionError("chain head annihilates the state");
    }
    Projector forced = partner(psi, c.at(2 * k), tol);
    const CMatrix required = identity(2) - c.at(1).projector().matrix();
    const double partner_residual = frobenius(forced.matrix() - c.at(2 * k + 1).projector().matrix());
    const double closure_residual = frobenius(forced.matrix() - required);
    const bool closure_holds = holds(Correlation(c.at(2 * k), c.at(1).complement()), psi, tol);
    return ClosureForcing{std::move(forced), partner_residual, closure_residual, closure_holds,
                          !closure_holds && closure_residual > tol};
}

RandomChain random_chain(Rng &rng, std::size_t length, double tol) {
    for (;;) {
        const StateVector psi = haar_state(rng, 2);
        const auto head = spin_observable(random_direction(rng), 1, 2);
        try {
            return RandomChain{psi, build_chain(psi, head, length, tol)};
        } catch (const PreconditionError &) {
            // measure-zero event; draw again
        }
    }
}

Prop2Sweep prop2_sweep(std::size_t k, std::size_t trials, std::uint64_t seed, double tol) {
    std::vector<std::optional<Prop2Report>> slots(trials);
    parallel_for(trials, [&](std::size_t t) {
        Rng rng(stream_seed(seed, t));
        const auto rc = random_chain(rng, 2 * k + 1, tol);
        slots[t] = prop2_verify(rc.chain, k, tol);
    });

    Prop2Sweep sweep;
    sweep.k = k;
    sweep.trials = trials;
    for (const auto &r : slots) {
        if (r->head_annihilates) {
            ++sweep.annihilated;
        }
        sweep.max_head_norm = std::max(sweep.max_head_norm, r->max_head_norm);
        sweep.max_impossible_residual_error =
            std::max(sweep.max_impossible_residual_error, std::abs(r->impossible_residual - std::numbers::sqrt2));
        if (sweep.solution_dim_histogram.size() <= r->solution_dim) {
            sweep.solution_dim_histogram.resize(r->solution_dim + 1, 0);
        }
        ++sweep.solution_dim_histogram[r->solution_dim];
    }
    return sweep;
}

} // namespace nlab
