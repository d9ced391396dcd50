#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "gselab/csp.hpp"
#include "gselab/cutnorm.hpp"
#include "gselab/experiment.hpp"
#include "gselab/gse.hpp"
#include "gselab/homdensity.hpp"
#include "gselab/io.hpp"
#include "gselab/qap.hpp"
#include "gselab/rng.hpp"

using nlohmann::json;
using namespace gselab;

namespace {

LayeredRArray instance_arrays(const Instance& inst) {
    if (inst.layered) return *inst.layered;
    if (inst.rarray) return LayeredRArray::single(*inst.rarray);
    if (inst.formula) return eval_rep(*inst.formula);
    throw ConfigError("instance does not describe an array");
}

LayeredInteraction instance_interaction(const Instance& inst, const LayeredRArray& G) {
    if (inst.interaction) {
        if (inst.interaction->size() == 1 && G.layer_count() > 1)
            throw ConfigError("layered instance needs one interaction per layer");
        return *inst.interaction;
    }
    if (inst.formula) {
        // indicator interactions of the MAX-rCSP reduction
        return canonical_interaction(inst.formula->q(), inst.formula->r());
    }
    throw ConfigError("instance carries no interaction block");
}

std::optional<StateDistribution> parse_micro(const std::string& spec) {
    if (spec.empty()) return std::nullopt;
    std::vector<double> masses;
    std::size_t pos = 0;
    while (pos <= spec.size()) {
        std::size_t comma = spec.find(',', pos);
        if (comma == std::string::npos) comma = spec.size();
        masses.push_back(std::stod(spec.substr(pos, comma - pos)));
        pos = comma + 1;
    }
    return StateDistribution(static_cast<int>(masses.size()), masses);
}

json witness_json(const CutWitness& w) {
    json subsets = json::array();
    for (const auto& s : w.subsets) subsets.push_back(s);
    return json{{"value", w.value}, {"subsets", subsets}};
}

int run(int argc, char** argv) {
    CLI::App app{"ground state energies, cut norms and sampling estimators on dense r-graphs"};
    app.require_subcommand(1);

    std::string instance_path, out_path, cost_path, template_path, csv_path;
    std::string oracle = "exact", estimator = "gse", micro_spec, eps_grid_spec;
    std::string solver = "exact", reference = "auto", mode = "hom";
    std::uint64_t seed = 0;
    int restarts = 20, trials = 100, k = 8, k_max = 64;
    double eps = 0.25;

    auto add_io = [&](CLI::App* cmd, bool needs_out = true) {
        cmd->add_option("--instance", instance_path, "instance JSON file")->required();
        if (needs_out) cmd->add_option("--out", out_path, "result JSON file")->required();
    };

    CLI::App* gse_cmd = app.add_subcommand("gse", "ground state energy of an instance");
    add_io(gse_cmd);
    gse_cmd->add_flag_callback("--exact", [&] { solver = "exact"; });
    gse_cmd->add_flag_callback("--local", [&] { solver = "local"; });
    gse_cmd->add_flag_callback("--ascent", [&] { solver = "ascent"; });
    gse_cmd->add_option("--restarts", restarts);
    gse_cmd->add_option("--seed", seed);

    CLI::App* micro_cmd = app.add_subcommand("micro-gse", "microcanonical ground state energy");
    add_io(micro_cmd);
    micro_cmd->add_option("--masses", micro_spec, "comma-separated class masses")->required();
    micro_cmd->add_flag_callback("--exact", [&] { solver = "exact"; });
    micro_cmd->add_flag_callback("--local", [&] { solver = "local"; });
    micro_cmd->add_option("--restarts", restarts);
    micro_cmd->add_option("--seed", seed);

    CLI::App* csp_cmd = app.add_subcommand("max-csp", "optimum density of a formula");
    add_io(csp_cmd);

    CLI::App* qap_cmd = app.add_subcommand("qap", "quadratic assignment optimum");
    add_io(qap_cmd);
    qap_cmd->add_option("--cost", cost_path, "cost array JSON file")->required();

    CLI::App* ac_cmd = app.add_subcommand("ac", "maximum acyclic subgraph density");
    add_io(ac_cmd);

    CLI::App* cutnorm_cmd = app.add_subcommand("cutnorm", "cut norm with witness");
    add_io(cutnorm_cmd);
    cutnorm_cmd->add_flag_callback("--exact", [&] { oracle = "exact"; });
    cutnorm_cmd->add_flag_callback("--heuristic", [&] { oracle = "heuristic"; });
    cutnorm_cmd->add_option("--restarts", restarts);
    cutnorm_cmd->add_option("--seed", seed);

    CLI::App* decomp_cmd = app.add_subcommand("cutdecomp", "cut decomposition");
    add_io(decomp_cmd);
    decomp_cmd->add_option("--eps", eps, "accuracy parameter")->required();
    decomp_cmd->add_flag_callback("--exact", [&] { oracle = "exact"; });
    decomp_cmd->add_flag_callback("--heuristic", [&] { oracle = "heuristic"; });
    decomp_cmd->add_option("--restarts", restarts);
    decomp_cmd->add_option("--seed", seed);

    CLI::App* hom_cmd = app.add_subcommand("homdensity", "decorated homomorphism density");
    add_io(hom_cmd);
    hom_cmd->add_option("--template", template_path, "decorated template JSON")->required();
    hom_cmd->add_option("--mode", mode, "hom | inj");

    CLI::App* sample_cmd = app.add_subcommand("sample", "seeded vertex sampling");
    add_io(sample_cmd);
    sample_cmd->add_option("--k", k, "sample size")->required();
    sample_cmd->add_option("--seed", seed);
    sample_cmd->add_flag_callback("--averaged", [&] { mode = "averaged"; });
    sample_cmd->add_flag_callback("--without-replacement", [&] { mode = "without"; });
    sample_cmd->add_flag_callback("--plain", [&] { mode = "plain"; });

    CLI::App* conc_cmd = app.add_subcommand("concentration", "estimator concentration trials");
    add_io(conc_cmd);
    conc_cmd->add_option("--estimator", estimator, "gse | max-csp | edge-density | cutnorm");
    conc_cmd->add_option("--k", k)->required();
    conc_cmd->add_option("--trials", trials)->required();
    conc_cmd->add_option("--eps", eps)->required();
    conc_cmd->add_option("--seed", seed);
    conc_cmd->add_option("--restarts", restarts);
    conc_cmd->add_option("--reference", reference);

    CLI::App* beta_cmd = app.add_subcommand("beta-curve", "empirical sample complexity curve");
    add_io(beta_cmd);
    beta_cmd->add_option("--estimator", estimator);
    beta_cmd->add_option("--eps-grid", eps_grid_spec, "comma-separated eps values")->required();
    beta_cmd->add_option("--trials", trials)->required();
    beta_cmd->add_option("--k-max", k_max);
    beta_cmd->add_option("--seed", seed);
    beta_cmd->add_option("--restarts", restarts);
    beta_cmd->add_option("--csv", csv_path, "also emit plot data as CSV");

    CLI11_PARSE(app, argc, argv);

    json result;
    json config_echo{{"seed", seed}};

    if (gse_cmd->parsed() || micro_cmd->parsed()) {
        Instance inst = load_instance(instance_path);
        LayeredRArray G = instance_arrays(inst);
        LayeredInteraction J = instance_interaction(inst, G);
        std::optional<StateDistribution> micro;
        if (micro_cmd->parsed()) micro = parse_micro(micro_spec);
        GseResult res;
        if (solver == "exact")
            res = gse_integer_exact(G, J, micro);
        else if (solver == "local")
            res = gse_integer_local(G, J, restarts, seed, micro);
        else
            res = gse_fractional_ascent(G, J, restarts, seed);
        config_echo["solver"] = solver;
        config_echo["restarts"] = restarts;
        result = json{{"config_echo", config_echo},
                      {"oracle", res.certificate == Certificate::Exact ? "exact" : "heuristic"},
                      {"seed", seed},
                      {"value", res.value}};
        if (res.integer_argmax) result["argmax"] = res.integer_argmax->assignment();
    } else if (csp_cmd->parsed()) {
        Instance inst = load_instance(instance_path);
        if (!inst.formula) throw ConfigError("max-csp needs a formula instance");
        result = json{{"config_echo", config_echo},
                      {"oracle", "exact"},
                      {"seed", seed},
                      {"value", max_csp_exact(*inst.formula)}};
    } else if (qap_cmd->parsed()) {
        Instance inst = load_instance(instance_path);
        Instance cost = load_instance(cost_path);
        if (!inst.rarray || !cost.rarray)
            throw ConfigError("qap needs rarray instances for both structure and cost");
        result = json{{"config_echo", config_echo},
                      {"oracle", "exact"},
                      {"seed", seed},
                      {"value", qap_exact(*inst.rarray, *cost.rarray)}};
    } else if (ac_cmd->parsed()) {
        Instance inst = load_instance(instance_path);
        if (!inst.rarray) throw ConfigError("ac needs an rarray instance");
        result = json{{"config_echo", config_echo},
                      {"oracle", "exact"},
                      {"seed", seed},
                      {"value", ac_exact(*inst.rarray)}};
    } else if (cutnorm_cmd->parsed()) {
        Instance inst = load_instance(instance_path);
        CutWitness w;
        if (inst.rarray)
            w = oracle == "exact" ? cut_norm_exact(*inst.rarray)
                                  : cut_norm_heuristic(*inst.rarray, restarts, seed);
        else if (inst.kernel)
            w = oracle == "exact" ? cut_norm_exact(*inst.kernel)
                                  : cut_norm_heuristic(*inst.kernel, restarts, seed);
        else
            throw ConfigError("cutnorm needs an rarray or step_kernel instance");
        config_echo["oracle"] = oracle;
        result = json{{"config_echo", config_echo},
                      {"oracle", oracle},
                      {"seed", seed},
                      {"value", w.value},
                      {"witness", witness_json(w)["subsets"]}};
    } else if (decomp_cmd->parsed()) {
        Instance inst = load_instance(instance_path);
        CutDecomposition dec;
        const CutOracle o = oracle == "exact" ? CutOracle::Exact : CutOracle::Heuristic;
        if (inst.rarray)
            dec = cut_decompose(*inst.rarray, eps, o, seed, restarts);
        else if (inst.kernel)
            dec = cut_decompose(*inst.kernel, eps, o, seed, restarts);
        else
            throw ConfigError("cutdecomp needs an rarray or step_kernel instance");
        json terms = json::array();
        double coeff_sum = 0;
        for (const auto& t : dec.terms) {
            json subsets = json::array();
            for (const auto& s : t.subsets) subsets.push_back(s);
            terms.push_back(json{{"coeff", t.coeff}, {"subsets", subsets}});
            coeff_sum += std::fabs(t.coeff);
        }
        config_echo["eps"] = eps;
        config_echo["oracle"] = oracle;
        result = json{{"config_echo", config_echo},
                      {"oracle", oracle},
                      {"seed", seed},
                      {"s", dec.terms.size()},
                      {"coefficient_l1", coeff_sum},
                      {"remainder_cutnorm", dec.certified_remainder_cutnorm},
                      {"remainder_certificate", dec.exact_certificate ? "exact" : "lower-bound"},
                      {"source_l2", dec.source_l2},
                      {"terms", terms}};
    } else if (hom_cmd->parsed()) {
        Instance inst = load_instance(instance_path);
        if (!inst.rarray) throw ConfigError("homdensity needs an rarray host");
        std::ifstream tf(template_path);
        if (!tf) throw ParseError("cannot open template file " + template_path);
        json tj;
        try {
            tf >> tj;
        } catch (const json::exception& e) {
            throw ParseError(std::string("malformed JSON: ") + e.what());
        }
        DecoratedTemplate F(tj.at("k").get<int>(), tj.at("r").get<int>());
        for (const auto& e : tj.at("edges")) {
            Decoration d;
            if (e.contains("table")) {
                d.mode = Decoration::Mode::Table;
                for (const auto& v : e.at("table")) d.data.push_back(v.get<double>());
            } else {
                d.mode = Decoration::Mode::Poly;
                for (const auto& v : e.at("poly")) d.data.push_back(v.get<double>());
            }
            std::vector<int> edge;
            for (const auto& v : e.at("edge")) edge.push_back(v.get<int>());
            F.decorate(edge, d);
        }
        const double value = mode == "inj" ? t_inj(F, *inst.rarray) : t_hom(F, *inst.rarray);
        config_echo["mode"] = mode;
        result = json{{"config_echo", config_echo},
                      {"oracle", "exact"},
                      {"seed", seed},
                      {"value", value}};
    } else if (sample_cmd->parsed()) {
        Instance inst = load_instance(instance_path);
        config_echo["k"] = k;
        config_echo["mode"] = mode;
        json payload;
        if (inst.formula) {
            Formula sub = sample_formula(*inst.formula, k, seed);
            json cs = json::array();
            for (const auto& c : sub.constraints())
                cs.push_back(json{{"table", c.table}, {"edge", c.edge}});
            payload = json{{"kind", "formula"}, {"n", sub.n()},       {"r", sub.r()},
                           {"q", sub.q()},      {"d", sub.d()},       {"constraints", cs}};
        } else if (inst.kernel) {
            SampledGraph s = mode == "averaged" ? sample_h(*inst.kernel, k, seed)
                                                : sample_g(*inst.kernel, k, seed);
            payload = rarray_to_json(s.array);
        } else if (inst.graphon) {
            SampledGraph s = mode == "averaged" ? sample_h(*inst.graphon, k, seed)
                                                : sample_g(*inst.graphon, k, seed);
            payload = rarray_to_json(s.array);
        } else if (inst.rarray) {
            if (mode == "without") {
                payload = rarray_to_json(sample_without_replacement(*inst.rarray, k, seed).array);
            } else {
                SampledGraph s = sample_g(graphon_of_graph(*inst.rarray), k, seed);
                payload = rarray_to_json(s.array);
            }
        } else {
            throw ConfigError("sample needs a formula, kernel, graphon or rarray instance");
        }
        result = json{{"config_echo", config_echo},
                      {"oracle", "sampler"},
                      {"sample", payload},
                      {"seed", seed}};
    } else if (conc_cmd->parsed()) {
        Instance inst = load_instance(instance_path);
        ExperimentConfig config;
        config.master_seed = seed;
        config.estimator = estimator;
        config.k = k;
        config.trials = trials;
        config.eps = eps;
        config.reference = reference;
        config.solver_restarts = restarts;
        TrialReport report = run_concentration(inst, config);
        std::fprintf(stderr, "concentration: %d trials in %.1f ms\n", trials, report.wall_ms);
        result = report.to_json(config);
    } else if (beta_cmd->parsed()) {
        Instance inst = load_instance(instance_path);
        ExperimentConfig config;
        config.master_seed = seed;
        config.estimator = estimator;
        config.trials = trials;
        config.k_max = k_max;
        config.solver_restarts = restarts;
        std::size_t pos = 0;
        while (pos <= eps_grid_spec.size()) {
            std::size_t comma = eps_grid_spec.find(',', pos);
            if (comma == std::string::npos) comma = eps_grid_spec.size();
            config.eps_grid.push_back(std::stod(eps_grid_spec.substr(pos, comma - pos)));
            pos = comma + 1;
        }
        std::vector<BetaCurveRow> rows = beta_curve(inst, config);
        result = beta_rows_to_json(rows, config);
        if (!csv_path.empty()) {
            std::ofstream csv(csv_path, std::ios::binary);
            if (!csv) throw ConfigError("cannot write CSV file " + csv_path);
            csv << beta_rows_to_csv(rows);
        }
    }

    write_result(out_path, result);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const ParseError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 1;
    } catch (const DimensionError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 1;
    } catch (const DomainError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 1;
    } catch (const ArgumentError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 1;
    } catch (const CapacityError& e) {
        std::cerr << "capacity error: " << e.what() << "\n";
        return 2;
    } catch (const ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    } catch (const InfeasibleError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
