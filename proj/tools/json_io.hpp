#pragma once

// JSON encodings of the library's input and output types.
//
//   StateVector     {"dim": N, "entries": [[re, im], ...]}
//   Direction       {"theta": r, "phi": r}
//   Observable      {"party": p, "direction": Direction}
//   Chain           [Observable, ...]
//   CorrelationSet  {"n_parties": n?, "observables": [Observable, ...],
//                    "correlations": [{"source": i, "target": j}, ...],
//                    "constraints": [{"observables": [i, ...], "forbidden_outcome": [b, ...]}]?}

#include <stdexcept>
#include <string>

#include <json.hpp>

#include "nlab/chains.hpp"
#include "nlab/hardy.hpp"
#include "nlab/reality_inference.hpp"

namespace nlab::io {

using nlohmann::json;

/// Input does not match a schema. Maps to exit code 2.
class SchemaError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// j[name], or SchemaError when absent.
const json &field_or_throw(const json &j, const char *name);

StateVector parse_state(const json &j);
Direction parse_direction(const json &j);
LocalObservable parse_observable(const json &j, int n_parties);
Chain parse_chain(const json &j);
ConstraintSystem parse_constraint_system(const json &j);

json to_json(const StateVector &psi);
json to_json(const Direction &d);
json to_json(const LocalObservable &o);
json to_json(const Chain &c);
json to_json(const CorrelationSet &s);
json to_json(const HardyConfig &h);
json to_json(const Prop2Report &r);
json to_json(const Prop2Sweep &s);
json to_json(const Step &s);
json to_json(const RefutationNode &n);
json to_json(const ConstraintSystem &system, const Contradiction &c);

/// True when every number in `j` is finite.
bool all_finite(const json &j);

} // namespace nlab::io
