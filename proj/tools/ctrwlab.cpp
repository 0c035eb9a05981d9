// ctrwlab: scenario runner.
//
//   ctrwlab run --config scenarios/attraction_a15.json --threads 4
//   ctrwlab simulate --alpha 1.5 --n-list 100 --reps 10 --out out/sim.json
//   ctrwlab diagnose gdca --config scenarios/gdca.json --seed 3
//   ctrwlab integrals --integrand deterministic:tanh(t) --beta 0.8 --limit
//   ctrwlab metrics --paths a.csv b.csv
//
// Exit status: 0 ok, 2 invalid input, 3 runtime or data error. Failures print
// one line "TAG: message" on stderr.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ctrwlab/error.hpp"
#include "ctrwlab/scenario.hpp"

using nlohmann::json;

namespace {

struct Common {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<std::int64_t> reps;
    std::string out;
    int threads = 1;
    std::vector<std::int64_t> n_list;
    // process overrides
    std::optional<double> alpha, beta, scale;
    std::string innovation;
    std::vector<double> coeffs;
    std::optional<double> horizon;
};

struct Extra {
    std::string integrand;
    std::vector<double> eps;
    std::optional<int> m;
    bool limit = false;
    std::optional<std::int64_t> paths;
    std::vector<std::string> metric_paths;
};

void add_common(CLI::App* app, Common& c, bool process_flags = true) {
    app->add_option("--config", c.config, "scenario JSON file");
    app->add_option("--seed", c.seed, "master seed");
    app->add_option("--reps", c.reps, "replications");
    app->add_option("--out", c.out, "report JSON path (stdout if omitted)");
    app->add_option("--threads", c.threads, "worker threads")->check(CLI::PositiveNumber);
    if (!process_flags) return;
    app->add_option("--n-list", c.n_list, "values of n")->delimiter(',');
    app->add_option("--alpha", c.alpha, "innovation tail index");
    app->add_option("--innovation", c.innovation, "symmetric | centered | raw | gaussian");
    app->add_option("--scale", c.scale, "innovation scale");
    app->add_option("--beta", c.beta, "waiting-time index (CTRW); omit for a moving average");
    app->add_option("--coeffs", c.coeffs, "moving-average coefficients c_0,...,c_J")->delimiter(',');
    app->add_option("--horizon", c.horizon, "time horizon T");
}

json load_json(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ctrwlab::IoError("IO_READ", "cannot open '" + path + "'");
    try {
        return json::parse(is);
    } catch (const json::parse_error& e) {
        throw ctrwlab::ParamError("CONFIG_PARSE", path + ": " + e.what());
    }
}

json& params_of(json& j) {
    if (!j.contains("params")) j["params"] = json::object();
    return j["params"];
}

json build(const std::string& kind, const Common& c, const Extra& x) {
    json j = c.config.empty() ? json{{"kind", kind}} : load_json(c.config);
    if (!j.is_object()) throw ctrwlab::ParamError("CONFIG_TYPE", "scenario must be a JSON object");
    if (kind != "run") {
        if (!j.contains("kind")) j["kind"] = kind;
        if (j["kind"] != kind)
            throw ctrwlab::ParamError("CONFIG_KIND", "config kind " + j["kind"].dump() + " does not match '" + kind + "'");
    }
    if (c.seed) j["seed"] = *c.seed;
    if (c.reps) j["reps"] = *c.reps;
    if (!c.n_list.empty()) j["n_list"] = c.n_list;
    if (!c.out.empty()) j["output"]["report"] = c.out;

    json& p = params_of(j);
    auto proc = [&]() -> json& {
        if (!p.contains("process")) p["process"] = json::object();
        return p["process"];
    };
    if (c.alpha) proc()["alpha"] = *c.alpha;
    if (c.beta) proc()["beta"] = *c.beta;
    if (c.scale) proc()["scale"] = *c.scale;
    if (!c.innovation.empty()) proc()["innovation"] = c.innovation;
    if (!c.coeffs.empty()) proc()["coefficients"] = c.coeffs;
    if (c.horizon) p["horizon"] = *c.horizon;

    if (!x.integrand.empty()) {
        json h;
        const auto colon = x.integrand.find(':');
        const std::string head = x.integrand.substr(0, colon);
        h["kind"] = head;
        if (colon != std::string::npos) h["expr"] = x.integrand.substr(colon + 1);
        p["integrand"] = h;
    }
    if (!x.eps.empty()) p["eps"] = x.eps;
    if (x.m) p["m"] = *x.m;
    if (x.limit) p["limit"] = true;
    if (x.paths) p["paths"] = *x.paths;
    if (!x.metric_paths.empty()) p["paths"] = x.metric_paths;
    if (p.empty()) j.erase("params");
    return j;
}

int run(const json& j, int threads) {
    const auto s = ctrwlab::Scenario::from_json(j);
    ctrwlab::RunOptions o;
    o.threads = threads;
    const auto rep = ctrwlab::run_scenario(s, o);
    if (s.report_path.empty()) std::cout << rep.to_json(true).dump(2) << "\n";
    return 0;
}

int fail(const std::string& tag, const std::string& msg, int code) {
    std::string line = tag + ": " + msg;
    for (char& ch : line)
        if (ch == '\n' || ch == '\r') ch = ' ';
    std::fprintf(stderr, "%s\n", line.c_str());
    return code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Heavy-tailed moving averages, CTRWs, integrals and SDE schemes"};
    app.require_subcommand(1);

    Common c;
    Extra x;
    std::string chosen;

    auto* run_cmd = app.add_subcommand("run", "run a scenario file (kind taken from the file)");
    add_common(run_cmd, c, false);
    run_cmd->get_option("--config")->required();
    run_cmd->callback([&] { chosen = "run"; });

    auto* sim = app.add_subcommand("simulate", "simulate bundles; writes CSV paths next to the report");
    add_common(sim, c);
    sim->add_option("--paths", x.paths, "number of paths per n written as CSV");
    sim->callback([&] { chosen = "simulate"; });

    auto* diag = app.add_subcommand("diagnose", "decomposition diagnostics");
    diag->require_subcommand(1);
    for (const char* k : {"gd", "gdca", "gdci"}) {
        auto* d = diag->add_subcommand(k, std::string(k) + " statistics");
        add_common(d, c);
        d->callback([&chosen, k] { chosen = k; });
    }

    auto* integ = app.add_subcommand("integrals", "stochastic integrals and the discretisation error");
    add_common(integ, c);
    integ->add_option("--integrand", x.integrand, "const | lipschitz | adversarial | deterministic:<expr>");
    integ->add_option("--eps", x.eps, "eps values for the discretised integrand")->delimiter(',');
    integ->add_option("--m", x.m, "grid size m");
    integ->add_flag("--limit", x.limit, "compare with the limit-scheme integral");
    integ->callback([&] { chosen = "integrals"; });

    auto* adv = app.add_subcommand("adversarial", "predictive-advantage integrand on correlated drivers");
    add_common(adv, c);
    adv->callback([&] { chosen = "adversarial"; });

    for (const char* k : {"sde", "sdde"}) {
        auto* s = app.add_subcommand(k, std::string(k) + " scheme vs its limit; coefficients from --config");
        add_common(s, c);
        s->callback([&chosen, k] { chosen = k; });
    }

    auto* met = app.add_subcommand("metrics", "uniform, J1 and M1 distances");
    add_common(met, c, false);
    met->add_option("--paths", x.metric_paths, "two CSV paths")->expected(2);
    met->callback([&] { chosen = "metrics"; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return fail("CLI_USAGE", e.what(), 2);
    }

    try {
        return run(build(chosen, c, x), c.threads);
    } catch (const ctrwlab::ParamError& e) {
        return fail(e.tag(), e.what(), 2);
    } catch (const ctrwlab::Error& e) {
        return fail(e.tag(), e.what(), 3);
    } catch (const std::bad_alloc&) {
        return fail("RUNTIME_MEMORY", "out of memory", 3);
    } catch (const std::exception& e) {
        return fail("RUNTIME", e.what(), 3);
    }
}
