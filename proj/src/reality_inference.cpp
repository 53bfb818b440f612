#include "nlab/reality_inference.hpp"

#include <algorithm>
#include <numbers>

#include "nlab/errors.hpp"
#include "nlab/parallel.hpp"

namespace nlab {

namespace {

using Values = std::vector<std::optional<std::uint8_t>>;

std::vector<std::optional<std::size_t>> complement_table(const ConstraintSystem &system) {
    std::vector<std::optional<std::size_t>> out(system.size());
    for (std::size_t i = 0; i < system.size(); ++i) {
        out[i] = system.correlations.complement_of(i);
    }
    return out;
}

// Checks whether `step` follows from `values` under the system's rules.
bool justified(const ConstraintSystem &system, const std::vector<std::optional<std::size_t>> &complements,
               const Values &values, const Step &step) {
    switch (step.rule) {
    case Rule::Seed:
    case Rule::Branch:
        return true;
    case Rule::Complement:
        return step.source < values.size() && complements[step.source] == step.observable &&
               values[step.source] == 1 - step.value;
    case Rule::Correlation: {
        const auto &links = system.correlations.links();
        if (step.source >= links.size()) {
            return false;
        }
        const auto &l = links[step.source];
        return l.target == step.observable && step.value == 1 && values[l.source] == 1;
    }
    case Rule::Exclusion: {
        if (step.source >= system.exclusions.size()) {
            return false;
        }
        const auto &e = system.exclusions[step.source];
        bool member = false;
        for (std::size_t m = 0; m < e.observables.size(); ++m) {
            if (e.observables[m] == step.observable) {
                member = true;
                if (step.value != 1 - e.forbidden[m]) {
                    return false;
                }
            } else if (values[e.observables[m]] != e.forbidden[m]) {
                return false;
            }
        }
        return member;
    }
    }
    return false;
}

class Propagator {
  public:
    explicit Propagator(const ConstraintSystem &system) : system_(system), complements_(complement_table(system)) {}

    // Records a step and mirrors it onto the complement. Returns the clashing step, if any.
    std::optional<Step> apply(RealityLedger &ledger, const Step &step) const {
        switch (ledger.record(step)) {
        case RealityLedger::Outcome::Clash:
            return step;
        case RealityLedger::Outcome::AlreadyKnown:
            return std::nullopt;
        case RealityLedger::Outcome::Added:
            break;
        }
        if (const auto c = complements_[step.observable]) {
            return apply(ledger, Step{Rule::Complement, *c, static_cast<std::uint8_t>(1 - step.value),
                                      step.observable});
        }
        return std::nullopt;
    }

    // One pass over all rules. Returns clash or whether anything was added.
    std::variant<bool, Step> sweep(RealityLedger &ledger) const {
        const std::size_t before = ledger.assigned_count();
        const auto &links = system_.correlations.links();
        for (std::size_t li = 0; li < links.size(); ++li) {
            if (ledger.value(links[li].source) == 1) {
                if (auto clash = apply(ledger, Step{Rule::Correlation, links[li].target, 1, li})) {
                    return *clash;
                }
            }
        }
        for (std::size_t ei = 0; ei < system_.exclusions.size(); ++ei) {
            const auto &e = system_.exclusions[ei];
            std::size_t matched = 0;
            std::optional<std::size_t> open;
            bool satisfied = false;
            for (std::size_t m = 0; m < e.observables.size(); ++m) {
                const auto v = ledger.value(e.observables[m]);
                if (!v) {
                    open = m;
                } else if (*v == e.forbidden[m]) {
                    ++matched;
                } else {
                    satisfied = true;
                }
            }
            if (satisfied) {
                continue;
            }
            if (matched == e.observables.size()) {
                // every member already matches: force the last one against its value
                const std::size_t m = e.observables.size() - 1;
                return Step{Rule::Exclusion, e.observables[m], static_cast<std::uint8_t>(1 - e.forbidden[m]), ei};
            }
            if (open && matched + 1 == e.observables.size()) {
                const Step step{Rule::Exclusion, e.observables[*open],
                                static_cast<std::uint8_t>(1 - e.forbidden[*open]), ei};
                if (auto clash = apply(ledger, step)) {
                    return *clash;
                }
            }
        }
        return ledger.assigned_count() > before;
    }

    const std::vector<std::optional<std::size_t>> &complements() const { return complements_; }

  private:
    const ConstraintSystem &system_;
    std::vector<std::optional<std::size_t>> complements_;
};

PropagationResult run_to_fixpoint(const Propagator &prop, RealityLedger ledger, std::size_t *rounds) {
    std::size_t productive = 0;
    for (;;) {
        auto r = prop.sweep(ledger);
        if (const auto *clash = std::get_if<Step>(&r)) {
            return PropagationConflict{clash->observable, *clash, ledger.trace()};
        }
        if (!std::get<bool>(r)) {
            break;
        }
        ++productive;
    }
    if (rounds) {
        *rounds = productive;
    }
    return ledger;
}

bool appears_in_constraints(const ConstraintSystem &system, std::size_t obs) {
    for (const auto &l : system.correlations.links()) {
        if (l.source == obs || l.target == obs) {
            return true;
        }
    }
    for (const auto &e : system.exclusions) {
        if (std::find(e.observables.begin(), e.observables.end(), obs) != e.observables.end()) {
            return true;
        }
    }
    return false;
}

// Depth-first refutation. nullopt means a consistent completion was found.
std::optional<RefutationNode> refute_node(const ConstraintSystem &system, const Propagator &prop,
                                          const RealityLedger &parent, const Step &assumption) {
    RefutationNode node;
    RealityLedger ledger = parent;
    const std::size_t mark = ledger.trace().size();

    auto finish_with_clash = [&](const Step &clash, const std::vector<Step> &trace) {
        node.steps.assign(trace.begin() + static_cast<std::ptrdiff_t>(mark), trace.end());
        node.conflict = clash;
        return node;
    };

    if (auto clash = prop.apply(ledger, assumption)) {
        return finish_with_clash(*clash, ledger.trace());
    }
    auto result = run_to_fixpoint(prop, std::move(ledger), nullptr);
    if (auto *conflict = std::get_if<PropagationConflict>(&result)) {
        return finish_with_clash(conflict->attempted, conflict->trace);
    }
    const auto &settled = std::get<RealityLedger>(result);
    node.steps.assign(settled.trace().begin() + static_cast<std::ptrdiff_t>(mark), settled.trace().end());

    std::optional<std::size_t> split;
    for (std::size_t i = 0; i < system.size(); ++i) {
        if (!settled.value(i) && appears_in_constraints(system, i)) {
            split = i;
            break;
        }
    }
    if (!split) {
        return std::nullopt;
    }
    node.split_on = split;
    for (std::uint8_t v = 0; v < 2; ++v) {
        auto child = refute_node(system, prop, settled, Step{Rule::Branch, *split, v, 0});
        if (!child) {
            return std::nullopt;
        }
        node.children.push_back(std::move(*child));
    }
    return node;
}

bool replay_node(const ConstraintSystem &system, const std::vector<std::optional<std::size_t>> &complements,
                 Values values, const RefutationNode &node, const Step &expected_first) {
    if (node.steps.empty() && !node.conflict) {
        return false;
    }
    const Step &first = node.steps.empty() ? *node.conflict : node.steps.front();
    if (first.rule != expected_first.rule || first.observable != expected_first.observable ||
        first.value != expected_first.value) {
        return false;
    }
    for (const auto &step : node.steps) {
        if (step.observable >= values.size() || values[step.observable] ||
            !justified(system, complements, values, step)) {
            return false;
        }
        values[step.observable] = step.value;
    }
    if (node.conflict) {
        const Step &c = *node.conflict;
        return node.children.empty() && c.observable < values.size() && values[c.observable] == 1 - c.value &&
               justified(system, complements, values, c);
    }
    if (!node.split_on || node.children.size() != 2 || values[*node.split_on]) {
        return false;
    }
    for (std::uint8_t v = 0; v < 2; ++v) {
        if (!replay_node(system, complements, values, node.children[v], Step{Rule::Branch, *node.split_on, v, 0})) {
            return false;
        }
    }
    return true;
}

bool violates(const ConstraintSystem &system, const std::vector<std::uint8_t> &values) {
    for (const auto &l : system.correlations.links()) {
        if (values[l.source] == 1 && values[l.target] == 0) {
            return true;
        }
    }
    for (const auto &e : system.exclusions) {
        bool all = true;
        for (std::size_t m = 0; m < e.observables.size() && all; ++m) {
            all = values[e.observables[m]] == e.forbidden[m];
        }
        if (all) {
            return true;
        }
    }
    return false;
}

} // namespace

const char *rule_name(Rule r) {
    switch (r) {
    case Rule::Seed:
        return "seed";
    case Rule::Branch:
        return "branch";
    case Rule::Complement:
        return "complement";
    case Rule::Correlation:
        return "correlation";
    case Rule::Exclusion:
        return "exclusion";
    }
    return "unknown";
}

RealityLedger::RealityLedger(std::size_t n_observables)
    : values_(n_observables), provenance_(n_observables) {}

std::optional<std::uint8_t> RealityLedger::value(std::size_t observable) const { return values_.at(observable); }

const std::optional<Step> &RealityLedger::provenance(std::size_t observable) const {
    return provenance_.at(observable);
}

std::size_t RealityLedger::assigned_count() const {
    return static_cast<std::size_t>(std::count_if(values_.begin(), values_.end(), [](auto v) { return v.has_value(); }));
}

RealityLedger::Outcome RealityLedger::record(const Step &step) {
    auto &slot = values_.at(step.observable);
    if (slot) {
        return *slot == step.value ? Outcome::AlreadyKnown : Outcome::Clash;
    }
    slot = step.value;
    provenance_[step.observable] = step;
    trace_.push_back(step);
    return Outcome::Added;
}

PropagationResult seeded(const ConstraintSystem &system, std::size_t observable, std::uint8_t value) {
    if (observable >= system.size() || value > 1) {
        throw InvalidArgument("seed refers to an unknown observable or a non-binary value");
    }
    const Propagator prop(system);
    RealityLedger ledger(system.size());
    const Step seed{Rule::Seed, observable, value, 0};
    if (auto clash = prop.apply(ledger, seed)) {
        return PropagationConflict{clash->observable, *clash, ledger.trace()};
    }
    return ledger;
}

PropagationResult propagate(RealityLedger ledger, const ConstraintSystem &system, std::size_t *rounds) {
    if (ledger.size() != system.size()) {
        throw DimensionError("ledger size differs from the observable count");
    }
    return run_to_fixpoint(Propagator(system), std::move(ledger), rounds);
}

std::optional<Refutation> refute(const ConstraintSystem &system, std::size_t observable, std::uint8_t value) {
    if (observable >= system.size() || value > 1) {
        throw InvalidArgument("refutation target out of range");
    }
    const Propagator prop(system);
    auto root = refute_node(system, prop, RealityLedger(system.size()), Step{Rule::Seed, observable, value, 0});
    if (!root) {
        return std::nullopt;
    }
    return Refutation{observable, value, std::move(*root)};
}

std::vector<std::string> Contradiction::derived_correlations(const ConstraintSystem &system) const {
    const std::string s = system.observables().at(observable).label();
    return {s + " -> 1-" + s, "1-" + s + " -> " + s};
}

std::optional<Contradiction> derive_contradiction(const ConstraintSystem &system, std::size_t target) {
    auto one = refute(system, target, 1);
    if (!one) {
        return std::nullopt;
    }
    auto zero = refute(system, target, 0);
    if (!zero) {
        return std::nullopt;
    }
    return Contradiction{target, std::move(*one), std::move(*zero)};
}

bool replay(const ConstraintSystem &system, const Refutation &r) {
    if (r.observable >= system.size()) {
        return false;
    }
    const auto complements = complement_table(system);
    return replay_node(system, complements, Values(system.size()), r.root,
                       Step{Rule::Seed, r.observable, r.seed_value, 0});
}

std::vector<std::vector<std::uint8_t>> lhv_search(const ConstraintSystem &system) {
    const auto complements = complement_table(system);
    std::vector<std::size_t> free;
    for (std::size_t i = 0; i < system.size(); ++i) {
        if (!complements[i] || *complements[i] > i) {
            free.push_back(i);
        }
    }
    if (free.size() > kMaxLhvObservables) {
        throw InvalidArgument("too many observables for exhaustive search (" + std::to_string(free.size()) +
                              " > " + std::to_string(kMaxLhvObservables) + "); a sampling search would be needed");
    }

    const std::uint64_t total = std::uint64_t{1} << free.size();
    const std::uint64_t block = 1 << 12;
    const std::size_t n_blocks = static_cast<std::size_t>((total + block - 1) / block);
    std::vector<std::vector<std::vector<std::uint8_t>>> found(n_blocks);

    parallel_for(n_blocks, [&](std::size_t b) {
        const std::uint64_t end = std::min(total, (b + 1) * block);
        std::vector<std::uint8_t> values(system.size(), 0);
        for (std::uint64_t mask = b * block; mask < end; ++mask) {
            for (std::size_t f = 0; f < free.size(); ++f) {
                const auto v = static_cast<std::uint8_t>((mask >> f) & 1U);
                values[free[f]] = v;
                if (const auto c = complements[free[f]]) {
                    values[*c] = static_cast<std::uint8_t>(1 - v);
                }
            }
            if (!violates(system, values)) {
                found[b].push_back(values);
            }
        }
    });

    std::vector<std::vector<std::uint8_t>> out;
    for (auto &f : found) {
        std::move(f.begin(), f.end(), std::back_inserter(out));
    }
    return out;
}

ConstraintSystem exclusion_constraints(const StateVector &psi,
                                       const std::vector<std::vector<Direction>> &directions_per_party,
                                       double tol) {
    const int n = psi.n_parties();
    if (static_cast<int>(directions_per_party.size()) != n) {
        throw DimensionError("need one direction list per party");
    }
    ConstraintSystem system{CorrelationSet(n), {}};
    std::vector<std::vector<std::size_t>> ids(static_cast<std::size_t>(n));
    for (int p = 0; p < n; ++p) {
        if (directions_per_party[static_cast<std::size_t>(p)].empty()) {
            throw InvalidArgument("every party needs at least one direction");
        }
        for (const auto &d : directions_per_party[static_cast<std::size_t>(p)]) {
            ids[static_cast<std::size_t>(p)].push_back(
                system.correlations.add_observable(spin_observable(d, p + 1, n)));
        }
    }

    // odometer over one setting per party
    std::vector<std::size_t> setting(static_cast<std::size_t>(n), 0);
    const auto dim = psi.dim();
    for (;;) {
        for (std::uint32_t outcome = 0; outcome < (1U << n); ++outcome) {
            CMatrix joint = identity(dim);
            ExclusionConstraint e;
            for (int p = 0; p < n; ++p) {
                const auto idx = ids[static_cast<std::size_t>(p)][setting[static_cast<std::size_t>(p)]];
                const auto bit = static_cast<std::uint8_t>((outcome >> (n - 1 - p)) & 1U);
                const auto &obs = system.observables()[idx];
                joint = joint * (bit ? obs.embedded() : obs.complement().embedded());
                e.observables.push_back(idx);
                e.forbidden.push_back(bit);
            }
            if (probability(joint, psi) <= tol) {
                system.exclusions.push_back(std::move(e));
            }
        }
        int p = n - 1;
        while (p >= 0) {
            auto &s = setting[static_cast<std::size_t>(p)];
            if (++s < ids[static_cast<std::size_t>(p)].size()) {
                break;
            }
            s = 0;
            --p;
        }
        if (p < 0) {
            break;
        }
    }
    return system;
}

GhszSystem ghsz_correlations() {
    CVector v = CVector::Zero(16);
    v(0) = 1.0 / std::numbers::sqrt2;
    v(15) = 1.0 / std::numbers::sqrt2;
    StateVector psi(v);
    const Direction x(std::numbers::pi / 2.0, 0.0);
    const Direction y(std::numbers::pi / 2.0, std::numbers::pi / 2.0);
    auto system = exclusion_constraints(psi, std::vector<std::vector<Direction>>(4, {x, y}));
    const auto target = system.correlations.find(spin_observable(x, 1, 4));
    return GhszSystem{std::move(psi), std::move(system), *target};
}

} // namespace nlab
