#include "json_io.hpp"

#include <cmath>

#include "nlab/errors.hpp"

namespace nlab::io {

namespace {

double number(const json &j, const char *what) {
    if (!j.is_number()) {
        throw SchemaError(std::string(what) + " must be a number");
    }
    const double v = j.get<double>();
    if (!std::isfinite(v)) {
        throw SchemaError(std::string(what) + " must be finite");
    }
    return v;
}

std::size_t index(const json &j, const char *what) {
    if (!j.is_number_integer() || j.get<long long>() < 0) {
        throw SchemaError(std::string(what) + " must be a nonnegative integer");
    }
    return j.get<std::size_t>();
}

} // namespace

const json &field_or_throw(const json &j, const char *name) {
    if (!j.is_object() || !j.contains(name)) {
        throw SchemaError(std::string("missing field \"") + name + "\"");
    }
    return j.at(name);
}

StateVector parse_state(const json &j) {
    const auto dim = index(field_or_throw(j, "dim"), "dim");
    const auto &entries = field_or_throw(j, "entries");
    if (!entries.is_array() || entries.size() != dim) {
        throw SchemaError("entries must be an array of length dim");
    }
    CVector v(static_cast<Eigen::Index>(dim));
    for (std::size_t i = 0; i < dim; ++i) {
        const auto &e = entries[i];
        if (!e.is_array() || e.size() != 2) {
            throw SchemaError("each entry must be [re, im]");
        }
        v(static_cast<Eigen::Index>(i)) = Complex(number(e[0], "re"), number(e[1], "im"));
    }
    return StateVector(v, 1e-9);
}

Direction parse_direction(const json &j) {
    return Direction(number(field_or_throw(j, "theta"), "theta"), number(field_or_throw(j, "phi"), "phi"));
}

LocalObservable parse_observable(const json &j, int n_parties) {
    const auto party = index(field_or_throw(j, "party"), "party");
    if (party < 1 || party > static_cast<std::size_t>(n_parties)) {
        throw SchemaError("party must lie in [1, n_parties]");
    }
    return spin_observable(parse_direction(field_or_throw(j, "direction")), static_cast<int>(party), n_parties);
}

Chain parse_chain(const json &j) {
    if (!j.is_array() || j.empty()) {
        throw SchemaError("chain must be a nonempty array of observables");
    }
    std::vector<LocalObservable> obs;
    for (const auto &o : j) {
        const auto party = index(field_or_throw(o, "party"), "party");
        if (party != 1 && party != 2) {
            throw SchemaError("chain observables must be on party 1 or 2");
        }
        obs.push_back(parse_observable(o, 2));
    }
    try {
        return Chain(std::move(obs));
    } catch (const InvalidArgument &e) {
        throw SchemaError(e.what());
    }
}

ConstraintSystem parse_constraint_system(const json &j) {
    const int n_parties = j.contains("n_parties") ? static_cast<int>(index(j.at("n_parties"), "n_parties")) : 2;
    if (n_parties < 2 || n_parties > 4) {
        throw SchemaError("n_parties must be 2, 3 or 4");
    }
    const auto &obs = field_or_throw(j, "observables");
    if (!obs.is_array()) {
        throw SchemaError("observables must be an array");
    }
    ConstraintSystem system{CorrelationSet(n_parties), {}};
    // input index -> deduplicated set index
    std::vector<std::size_t> ids;
    for (const auto &o : obs) {
        ids.push_back(system.correlations.add_observable(parse_observable(o, n_parties)));
    }
    auto resolve = [&](const json &v) {
        const auto i = index(v, "observable index");
        if (i >= ids.size()) {
            throw SchemaError("observable index out of range");
        }
        return ids[i];
    };
    if (j.contains("correlations")) {
        for (const auto &c : j.at("correlations")) {
            try {
                system.correlations.add_link(resolve(field_or_throw(c, "source")), resolve(field_or_throw(c, "target")));
            } catch (const InvalidArgument &e) {
                throw SchemaError(e.what());
            }
        }
    }
    if (j.contains("constraints")) {
        for (const auto &c : j.at("constraints")) {
            const auto &members = field_or_throw(c, "observables");
            const auto &forbidden = field_or_throw(c, "forbidden_outcome");
            if (!members.is_array() || !forbidden.is_array() || members.size() != forbidden.size() ||
                members.empty()) {
                throw SchemaError("constraint needs equal-length observables and forbidden_outcome");
            }
            ExclusionConstraint e;
            for (std::size_t m = 0; m < members.size(); ++m) {
                e.observables.push_back(resolve(members[m]));
                const auto b = index(forbidden[m], "outcome");
                if (b > 1) {
                    throw SchemaError("outcomes must be 0 or 1");
                }
                e.forbidden.push_back(static_cast<std::uint8_t>(b));
            }
            system.exclusions.push_back(std::move(e));
        }
    }
    return system;
}

json to_json(const StateVector &psi) {
    json entries = json::array();
    for (Eigen::Index i = 0; i < psi.dim(); ++i) {
        entries.push_back({psi.amplitudes()(i).real(), psi.amplitudes()(i).imag()});
    }
    return {{"dim", psi.dim()}, {"entries", entries}};
}

json to_json(const Direction &d) { return {{"theta", d.theta()}, {"phi", d.phi()}}; }

json to_json(const LocalObservable &o) {
    return {{"party", o.party()}, {"direction", to_json(*o.direction())}};
}

json to_json(const Chain &c) {
    json out = json::array();
    for (const auto &o : c.observables()) {
        out.push_back(to_json(o));
    }
    return out;
}

json to_json(const CorrelationSet &s) {
    json obs = json::array();
    for (const auto &o : s.observables()) {
        obs.push_back(to_json(o));
    }
    json links = json::array();
    for (const auto &l : s.links()) {
        links.push_back({{"source", l.source}, {"target", l.target}});
    }
    return {{"n_parties", s.n_parties()}, {"observables", obs}, {"correlations", links}};
}

json to_json(const HardyConfig &h) {
    json residuals = json::array();
    for (const auto &c : h.correlations()) {
        residuals.push_back(correlation_residual(c, h.psi).vector_form);
    }
    return {{"state", to_json(h.psi)},
            {"n1", to_json(h.n1)},
            {"n2", to_json(h.n2)},
            {"n3", to_json(h.n3)},
            {"n4", to_json(h.n4)},
            {"p_violation", h.p_violation},
            {"n1_n3_nonparallel", h.n1_n3_nonparallel},
            {"n2_n4_nonparallel", h.n2_n4_nonparallel},
            {"correlation_residuals", residuals}};
}

json to_json(const Prop2Report &r) {
    json cascade = json::array();
    for (const auto &c : r.cascade) {
        cascade.push_back({{"j", c.j}, {"left", c.left}, {"right", c.right}, {"residual", c.residual}});
    }
    return {{"k", r.k},
            {"solution_dim", r.solution_dim},
            {"max_residual", r.max_head_norm},
            {"head_annihilates", r.head_annihilates},
            {"closure_identity_residual", r.closure_identity_residual},
            {"cascade", cascade},
            {"impossible_position", r.impossible_position},
            {"impossible_residual", r.impossible_residual}};
}

json to_json(const Prop2Sweep &s) {
    return {{"k", s.k},
            {"trials", s.trials},
            {"annihilated", s.annihilated},
            {"max_residual", s.max_head_norm},
            {"max_impossible_residual_error", s.max_impossible_residual_error},
            {"solution_dim_histogram", s.solution_dim_histogram}};
}

json to_json(const Step &s) {
    json out{{"rule", rule_name(s.rule)}, {"observable", s.observable}, {"value", s.value}};
    if (s.rule != Rule::Seed && s.rule != Rule::Branch) {
        out["source"] = s.source;
    }
    return out;
}

json to_json(const RefutationNode &n) {
    json steps = json::array();
    for (const auto &s : n.steps) {
        steps.push_back(to_json(s));
    }
    json out{{"steps", steps}};
    if (n.conflict) {
        out["conflict"] = to_json(*n.conflict);
    }
    if (n.split_on) {
        out["split_on"] = *n.split_on;
        json children = json::array();
        for (const auto &c : n.children) {
            children.push_back(to_json(c));
        }
        out["children"] = children;
    }
    return out;
}

json to_json(const ConstraintSystem &system, const Contradiction &c) {
    return {{"observable", c.observable},
            {"label", system.observables().at(c.observable).label()},
            {"derived_correlations", c.derived_correlations(system)},
            {"replay_ok", replay(system, c.one_forces_zero) && replay(system, c.zero_forces_one)},
            {"one_forces_zero", to_json(c.one_forces_zero.root)},
            {"zero_forces_one", to_json(c.zero_forces_one.root)}};
}

bool all_finite(const json &j) {
    if (j.is_number_float()) {
        return std::isfinite(j.get<double>());
    }
    if (j.is_array() || j.is_object()) {
        for (const auto &v : j) {
            if (!all_finite(v)) {
                return false;
            }
        }
    }
    return true;
}

} // namespace nlab::io
