#include "cli.hpp"

#include <array>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "json_io.hpp"
#include "nlab/errors.hpp"

namespace nlab::cli {

namespace {

using io::json;

constexpr std::array<std::pair<Command, const char *>, 7> kCommands{{
    {Command::Hardy, "hardy"},
    {Command::HardyOptimize, "hardy-optimize"},
    {Command::Sensitivity, "sensitivity"},
    {Command::ChainVerify, "chain-verify"},
    {Command::Prop2Check, "prop2-check"},
    {Command::Ghsz, "ghsz"},
    {Command::LhvClosure, "lhv-closure"},
}};

struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

json read_input(const RunConfig &config) {
    if (!config.input_path) {
        throw ValidationError(std::string(command_name(config.command)) + " needs --input");
    }
    std::ifstream in(*config.input_path);
    if (!in) {
        throw ValidationError("cannot read input file " + *config.input_path);
    }
    try {
        return json::parse(in);
    } catch (const json::parse_error &e) {
        throw ValidationError(std::string("input is not valid JSON: ") + e.what());
    }
}

json config_echo(const RunConfig &c) {
    json j{{"command", command_name(c.command)},
           {"seed", c.seed},
           {"tol", c.tol},
           {"format", c.format == Format::Json ? "json" : "csv"}};
    if (c.input_path) {
        j["input"] = *c.input_path;
    }
    switch (c.command) {
    case Command::Hardy:
        j["lambda"] = c.lambda;
        j["theta"] = c.theta;
        j["phi"] = c.phi;
        break;
    case Command::HardyOptimize:
        j["starts"] = c.starts;
        break;
    case Command::Sensitivity:
        j["lambda"] = c.lambda;
        j["theta"] = c.theta;
        j["phi"] = c.phi;
        j["eps_min"] = c.eps_min;
        j["eps_max"] = c.eps_max;
        j["points"] = c.points;
        break;
    case Command::Prop2Check:
        j["k"] = c.k;
        j["trials"] = c.trials;
        break;
    case Command::LhvClosure:
        j["target"] = c.target;
        break;
    case Command::ChainVerify:
    case Command::Ghsz:
        break;
    }
    return j;
}

HardyConfig hardy_from_config(const RunConfig &c) {
    if (c.input_path) {
        const json in = read_input(c);
        return build_hardy(io::parse_state(io::field_or_throw(in, "state")),
                           io::parse_direction(io::field_or_throw(in, "n1")), c.tol);
    }
    return build_hardy(schmidt_state(c.lambda), Direction(c.theta, c.phi), c.tol);
}

json run_hardy(const RunConfig &c) { return io::to_json(hardy_from_config(c)); }

json run_hardy_optimize(const RunConfig &c) {
    OptimizerConfig opt;
    opt.starts = c.starts;
    opt.seed = c.seed;
    const auto best = max_hardy_probability(opt);
    return {{"p_max", best.p_max},
            {"lambda", best.lambda},
            {"theta", best.n1.theta()},
            {"phi", best.n1.phi()},
            {"converged", best.converged},
            {"state", io::to_json(best.psi)}};
}

SensitivityReport sensitivity_report(const RunConfig &c) {
    const auto hardy = hardy_from_config(c);
    const auto eps = log_grid(c.eps_min, c.eps_max, c.points);
    return sensitivity(hardy, eps);
}

json run_chain_verify(const RunConfig &c) {
    const json in = read_input(c);
    const StateVector psi = io::parse_state(io::field_or_throw(in, "state"));
    if (psi.n_parties() != 2) {
        throw ValidationError("chain-verify needs a two-qubit state");
    }
    const Chain chain = io::parse_chain(io::field_or_throw(in, "chain"));
    json residuals = json::array();
    for (const auto &l : chain.links()) {
        residuals.push_back(correlation_residual(l, psi).vector_form);
    }
    json out{{"chain", io::to_json(chain)}, {"verified", verify_chain(chain, psi, c.tol)}, {"link_residuals", residuals}};
    try {
        out["lemma1"] = lemma1_check(chain, psi, c.tol);
    } catch (const PreconditionError &e) {
        out["lemma1"] = nullptr;
        out["lemma1_precondition"] = e.what();
    }
    return out;
}

json run_prop2(const RunConfig &c) {
    if (c.input_path) {
        const json in = read_input(c);
        const Chain chain = io::parse_chain(io::field_or_throw(in, "chain"));
        const std::size_t k = in.contains("k") ? in.at("k").get<std::size_t>() : c.k;
        return io::to_json(prop2_verify(chain, k, c.tol));
    }
    if (c.k < 1) {
        throw ValidationError("--k must be at least 1");
    }
    const auto sweep = prop2_sweep(c.k, c.trials, c.seed, c.tol);
    json out = io::to_json(sweep);
    out["passed"] = sweep.annihilated == sweep.trials;
    return out;
}

json contradiction_json(const ConstraintSystem &system, std::size_t target) {
    const auto contradiction = derive_contradiction(system, target);
    if (!contradiction) {
        return nullptr;
    }
    return io::to_json(system, *contradiction);
}

json run_ghsz(const RunConfig &) {
    const auto g = ghsz_correlations();
    const auto models = lhv_search(g.system);
    json observables = json::array();
    for (const auto &o : g.system.observables()) {
        observables.push_back(o.label());
    }
    return {{"n_constraints", g.system.exclusions.size()},
            {"n_observables", g.system.size()},
            {"observables", observables},
            {"lhv_models", models.size()},
            {"contradiction", contradiction_json(g.system, g.target)}};
}

json run_lhv_closure(const RunConfig &c) {
    const json in = read_input(c);
    ConstraintSystem system = io::parse_constraint_system(in);
    system.correlations = system.correlations.closed();
    if (c.target >= system.size()) {
        throw ValidationError("--target exceeds the observable count");
    }
    const auto models = lhv_search(system);
    json out{{"closed_set", io::to_json(system.correlations)},
             {"n_constraints", system.exclusions.size()},
             {"lhv_models", models.size()},
             {"contradiction", contradiction_json(system, c.target)}};
    if (in.contains("seeds")) {
        RealityLedger ledger(system.size());
        for (const auto &s : in.at("seeds")) {
            const auto obs = s.at("observable").get<std::size_t>();
            const auto value = s.at("value").get<int>();
            if (obs >= system.size() || (value != 0 && value != 1)) {
                throw ValidationError("seed out of range");
            }
            ledger.record(Step{Rule::Seed, obs, static_cast<std::uint8_t>(value), 0});
        }
        const auto result = propagate(std::move(ledger), system);
        if (const auto *l = std::get_if<RealityLedger>(&result)) {
            json values = json::array();
            for (std::size_t i = 0; i < l->size(); ++i) {
                values.push_back(l->value(i) ? json(*l->value(i)) : json(nullptr));
            }
            out["propagation"] = {{"values", values}};
        } else {
            const auto &conflict = std::get<PropagationConflict>(result);
            out["propagation"] = {{"conflict", io::to_json(conflict.attempted)}};
        }
    }
    return out;
}

void write_csv(const RunConfig &c, const SensitivityReport &r, std::ostream &os) {
    os << "epsilon,leak_probability\n" << std::setprecision(17);
    for (std::size_t i = 0; i < r.epsilons.size(); ++i) {
        os << r.epsilons[i] << ',' << r.leak_probabilities[i] << '\n';
    }
    os << "# " << kToolName << ' ' << kVersion << " command=" << command_name(c.command) << " seed=" << c.seed
       << " tol=" << c.tol << " fitted_exponent=" << r.fitted_exponent << '\n';
}

std::string render(const RunConfig &c) {
    if (c.format == Format::Csv) {
        if (c.command != Command::Sensitivity) {
            throw ValidationError("csv output is only available for sensitivity");
        }
        const auto report = sensitivity_report(c);
        if (!std::isfinite(report.fitted_exponent)) {
            throw InternalError("non-finite fitted exponent");
        }
        std::ostringstream os;
        write_csv(c, report, os);
        return os.str();
    }

    json result;
    switch (c.command) {
    case Command::Hardy:
        result = run_hardy(c);
        break;
    case Command::HardyOptimize:
        result = run_hardy_optimize(c);
        break;
    case Command::Sensitivity: {
        const auto r = sensitivity_report(c);
        result = {{"epsilons", r.epsilons},
                  {"leak_probabilities", r.leak_probabilities},
                  {"fitted_exponent", r.fitted_exponent}};
        break;
    }
    case Command::ChainVerify:
        result = run_chain_verify(c);
        break;
    case Command::Prop2Check:
        result = run_prop2(c);
        break;
    case Command::Ghsz:
        result = run_ghsz(c);
        break;
    case Command::LhvClosure:
        result = run_lhv_closure(c);
        break;
    }
    const json doc{{"tool", kToolName}, {"version", kVersion}, {"config", config_echo(c)}, {"result", result}};
    if (!io::all_finite(doc)) {
        throw InternalError("result contains a non-finite number");
    }
    return doc.dump(2) + "\n";
}

} // namespace

const char *command_name(Command c) {
    for (const auto &[cmd, name] : kCommands) {
        if (cmd == c) {
            return name;
        }
    }
    return "unknown";
}

std::optional<Command> parse_command(const std::string &name) {
    for (const auto &[cmd, n] : kCommands) {
        if (name == n) {
            return cmd;
        }
    }
    return std::nullopt;
}

int run(const RunConfig &config, std::ostream &out, std::ostream &err) {
    std::string text;
    try {
        if (!(config.tol > 0.0) || !std::isfinite(config.tol)) {
            throw ValidationError("--tol must be positive");
        }
        text = render(config);
    } catch (const ValidationError &e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const io::SchemaError &e) {
        err << "schema error: " << e.what() << '\n';
        return 2;
    } catch (const json::exception &e) {
        err << "schema error: " << e.what() << '\n';
        return 2;
    } catch (const InternalError &e) {
        err << "internal error: " << e.what() << '\n';
        return 1;
    } catch (const Error &e) {
        // invariant and precondition failures trace back to the supplied input
        err << "invalid input: " << e.what() << '\n';
        return 2;
    } catch (const std::exception &e) {
        err << "internal error: " << e.what() << '\n';
        return 1;
    }

    if (config.output_path) {
        std::ofstream f(*config.output_path, std::ios::binary);
        if (!f || !(f << text)) {
            err << "error: cannot write " << *config.output_path << '\n';
            return 1;
        }
    } else {
        out << text;
    }
    return 0;
}

int main_entry(int argc, char **argv) {
    CLI::App app{"Hardy/GHSZ nonlocality laboratory"};
    RunConfig config;
    std::string command;
    std::string format = "json";
    std::string input;
    std::string output;

    std::vector<std::string> names;
    for (const auto &[cmd, name] : kCommands) {
        names.emplace_back(name);
    }
    app.add_option("command", command, "Experiment to run")->required()->check(CLI::IsMember(names));
    app.add_option("--seed", config.seed, "Random seed");
    app.add_option("--tol", config.tol, "Correlation tolerance");
    app.add_option("--input,-i", input, "Input JSON file");
    app.add_option("--output,-o", output, "Output file (default stdout)");
    app.add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    app.add_option("--k", config.k, "Closure index for prop2-check");
    app.add_option("--trials", config.trials, "Random chains per prop2-check sweep");
    app.add_option("--starts", config.starts, "Optimizer starts for hardy-optimize");
    app.add_option("--lambda", config.lambda, "Schmidt coefficient of the Hardy state");
    app.add_option("--theta", config.theta, "Polar angle of n1");
    app.add_option("--phi", config.phi, "Azimuth of n1");
    app.add_option("--eps-min", config.eps_min, "Smallest misalignment angle");
    app.add_option("--eps-max", config.eps_max, "Largest misalignment angle");
    app.add_option("--points", config.points, "Number of misalignment angles");
    app.add_option("--target", config.target, "Observable index for lhv-closure");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &e) {
        return app.exit(e);
    } catch (const CLI::ParseError &e) {
        app.exit(e);
        return 2;
    }
    config.command = *parse_command(command);
    config.format = format == "csv" ? Format::Csv : Format::Json;
    if (!input.empty()) {
        config.input_path = input;
    }
    if (!output.empty()) {
        config.output_path = output;
    }
    return run(config, std::cout, std::cerr);
}

} // namespace nlab::cli
