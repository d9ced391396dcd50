#include "gselab/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <memory>
#include <thread>

#include "gselab/csp.hpp"
#include "gselab/cutnorm.hpp"
#include "gselab/gse.hpp"
#include "gselab/homdensity.hpp"
#include "gselab/rng.hpp"

namespace gselab {

using nlohmann::json;

int thread_cap() {
    if (const char* env = std::getenv("GSELAB_THREADS")) {
        const int v = std::atoi(env);
        if (v >= 1) return v;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw ? static_cast<int>(hw) : 1;
}

void parallel_for(int n, const std::function<void(int)>& body) {
    const int workers = std::min(thread_cap(), std::max(n, 1));
    if (workers <= 1) {
        for (int i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) body(i);
        });
    for (auto& t : pool) t.join();
}

namespace {

// mass-weighted fractional energy of a step kernel under rows x (m x q)
double kernel_energy(const StepKernel& W, const InteractionArray& J,
                     const std::vector<double>& x, int q) {
    const int m = W.steps(), r = W.r();
    std::vector<int> c(r, 0);
    std::vector<int> z(r, 0);
    std::size_t flat = 0;
    double total = 0;
    do {
        double wmass = W.values()[flat];
        for (int j = 0; j < r; ++j) wmass *= W.masses()[c[j]];
        if (wmass != 0.0) {
            std::fill(z.begin(), z.end(), 0);
            do {
                std::size_t cell = 0;
                double prod = wmass;
                for (int j = 0; j < r; ++j) {
                    cell = cell * q + z[j];
                    prod *= x[static_cast<std::size_t>(c[j]) * q + z[j]];
                }
                total += J.coeff(cell) * prod;
            } while (next_tuple(z, q));
        }
        ++flat;
    } while (next_tuple(c, m));
    return total;
}

std::vector<std::vector<double>> simplex_lattice(int q, int grid) {
    std::vector<std::vector<double>> points;
    std::vector<int> part(q, 0);
    std::function<void(int, int)> rec = [&](int idx, int left) {
        if (idx == q - 1) {
            part[idx] = left;
            std::vector<double> p(q);
            for (int i = 0; i < q; ++i) p[i] = static_cast<double>(part[i]) / grid;
            points.push_back(std::move(p));
            return;
        }
        for (int t = 0; t <= left; ++t) {
            part[idx] = t;
            rec(idx + 1, left - t);
        }
    };
    rec(0, grid);
    return points;
}

} // namespace

double stepkernel_gse_reference(const StepKernel& W, const InteractionArray& J,
                                int grid, int restarts, std::uint64_t seed) {
    if (J.is_table())
        throw ArgumentError("stepkernel_gse_reference: real interactions required");
    const int m = W.steps(), q = J.q();

    auto polish = [&](std::vector<double> x) {
        double current = kernel_energy(W, J, x, q);
        for (int sweep = 0; sweep < 1000; ++sweep) {
            const double start = current;
            for (int v = 0; v < m; ++v) {
                std::vector<double> saved(x.begin() + static_cast<std::size_t>(v) * q,
                                          x.begin() + static_cast<std::size_t>(v) * q + q);
                double best_val = current;
                std::vector<double> best_row = saved;
                auto try_row = [&](const std::vector<double>& row) {
                    for (int i = 0; i < q; ++i) x[static_cast<std::size_t>(v) * q + i] = row[i];
                    const double val = kernel_energy(W, J, x, q);
                    if (val > best_val) {
                        best_val = val;
                        best_row = row;
                    }
                };
                for (int s = 0; s < q; ++s) {
                    std::vector<double> row(q, 0.0);
                    row[s] = 1.0;
                    try_row(row);
                }
                if (q == 2 && W.r() == 2) {
                    // exact quadratic row maximization over t in [0,1]
                    std::vector<double> r0{1.0, 0.0}, r1{0.0, 1.0}, rh{0.5, 0.5};
                    for (int i = 0; i < q; ++i) x[static_cast<std::size_t>(v) * q + i] = r0[i];
                    const double e0 = kernel_energy(W, J, x, q);
                    for (int i = 0; i < q; ++i) x[static_cast<std::size_t>(v) * q + i] = r1[i];
                    const double e1 = kernel_energy(W, J, x, q);
                    for (int i = 0; i < q; ++i) x[static_cast<std::size_t>(v) * q + i] = rh[i];
                    const double eh = kernel_energy(W, J, x, q);
                    const double a = 2 * e0 + 2 * e1 - 4 * eh;
                    const double b = e1 - e0 - a;
                    if (a < -1e-15) {
                        const double t = std::clamp(-b / (2 * a), 0.0, 1.0);
                        try_row({1.0 - t, t});
                    }
                }
                for (int i = 0; i < q; ++i)
                    x[static_cast<std::size_t>(v) * q + i] = best_row[i];
                current = best_val;
            }
            if (current - start < 1e-13) break;
        }
        return current;
    };

    double best = -std::numeric_limits<double>::infinity();

    // lattice scan over per-row simplex points
    const auto lattice = simplex_lattice(q, std::max(grid, 1));
    std::vector<std::size_t> pick(m, 0);
    std::vector<double> x(static_cast<std::size_t>(m) * q);
    std::vector<double> best_lattice_x;
    double best_lattice = -std::numeric_limits<double>::infinity();
    while (true) {
        for (int v = 0; v < m; ++v)
            for (int i = 0; i < q; ++i)
                x[static_cast<std::size_t>(v) * q + i] = lattice[pick[v]][i];
        const double val = kernel_energy(W, J, x, q);
        if (val > best_lattice) {
            best_lattice = val;
            best_lattice_x = x;
        }
        int v = m - 1;
        for (; v >= 0; --v) {
            if (++pick[v] < lattice.size()) break;
            pick[v] = 0;
        }
        if (v < 0) break;
    }
    best = std::max(best, polish(best_lattice_x));

    for (int restart = 0; restart < restarts; ++restart) {
        rng::Stream stream(rng::derive(seed, "kernel-gse-restart", restart), "start");
        for (int v = 0; v < m; ++v) {
            double s = 0;
            for (int i = 0; i < q; ++i) {
                x[static_cast<std::size_t>(v) * q + i] =
                    -std::log(std::max(stream.next_unit(), 1e-300));
                s += x[static_cast<std::size_t>(v) * q + i];
            }
            for (int i = 0; i < q; ++i) x[static_cast<std::size_t>(v) * q + i] /= s;
        }
        best = std::max(best, polish(x));
    }
    return best;
}

json ExperimentConfig::echo() const {
    json j{{"estimator", estimator}, {"k", k},
           {"trials", trials},       {"eps", eps},
           {"seed", master_seed},    {"reference", reference},
           {"solver_restarts", solver_restarts}};
    if (!eps_grid.empty()) j["eps_grid"] = eps_grid;
    if (k_max) j["k_max"] = k_max;
    return j;
}

json TrialReport::to_json(const ExperimentConfig& config) const {
    json q = json::object();
    for (const auto& [name, v] : quantiles) q[name] = v;
    return json{{"config_echo", config.echo()},
                {"estimates", estimates},
                {"failure_rate", failure_rate},
                {"oracle", oracle},
                {"quantiles", q},
                {"reference", reference},
                {"seed", config.master_seed},
                {"threshold", threshold}};
}

namespace {

struct Estimator {
    std::function<double(int k, std::uint64_t trial_seed)> run;
    double reference = 0;
    std::string oracle;
    double scale = 1; // threshold = eps * scale
};

DecoratedTemplate edge_density_template(int r) {
    DecoratedTemplate F(r, r);
    std::vector<int> edge(r);
    for (int j = 0; j < r; ++j) edge[j] = j;
    Decoration d;
    d.mode = Decoration::Mode::Poly;
    d.data = {0.0, 1.0}; // identity in the entry
    F.decorate(edge, d);
    return F;
}

Estimator make_estimator(const Instance& instance, const ExperimentConfig& config) {
    Estimator est;
    if (config.estimator == "gse") {
        if (!instance.kernel || !instance.interaction)
            throw ConfigError("gse estimator needs a step_kernel instance with an interaction");
        const StepKernel& W = *instance.kernel;
        const InteractionArray J = instance.interaction->front();
        est.oracle = "derived:ascent";
        est.reference = stepkernel_gse_reference(W, J, config.oracle_grid,
                                                 config.oracle_restarts,
                                                 rng::derive(config.master_seed, "oracle", 0));
        est.scale = static_cast<double>(instance.interaction->size()) * J.inf_norm() *
                    W.inf_norm();
        const int restarts = config.solver_restarts;
        est.run = [&W, J, restarts](int k, std::uint64_t seed) {
            SampledGraph s = sample_g(W, k, seed);
            GseResult res = gse_integer_local(LayeredRArray::single(s.array),
                                              LayeredInteraction{J}, restarts,
                                              rng::derive(seed, "solver", 0));
            return res.value;
        };
    } else if (config.estimator == "max-csp") {
        if (!instance.formula) throw ConfigError("max-csp estimator needs a formula instance");
        const Formula& F = *instance.formula;
        est.oracle = "exact";
        est.reference = max_csp_exact(F);
        est.scale = 1;
        est.run = [&F](int k, std::uint64_t seed) {
            return max_csp_exact(sample_formula(F, k, seed));
        };
    } else if (config.estimator == "edge-density") {
        if (!instance.rarray)
            throw ConfigError("edge-density estimator needs an rarray instance");
        const RArray& G = *instance.rarray;
        auto F = std::make_shared<DecoratedTemplate>(edge_density_template(G.r()));
        est.oracle = "exact";
        est.reference = t_hom(*F, G);
        est.scale = 1;
        est.run = [&G, F](int k, std::uint64_t seed) {
            SampledGraph s = sample_without_replacement(G, k, seed);
            return t_hom(*F, s.array);
        };
    } else if (config.estimator == "cutnorm") {
        if (!instance.kernel) throw ConfigError("cutnorm estimator needs a step_kernel instance");
        const StepKernel& W = *instance.kernel;
        est.oracle = "exact";
        est.reference = cut_norm_exact(W).value;
        est.scale = W.inf_norm();
        est.run = [&W](int k, std::uint64_t seed) {
            SampledGraph H = sample_h(W, k, seed);
            const bool exact_ok = static_cast<std::size_t>(W.r() - 1) * k <= 24;
            const double norm =
                exact_ok ? cut_norm_exact(H.array).value
                         : cut_norm_heuristic(H.array, 64, rng::derive(seed, "oracle", 0)).value;
            return norm / static_cast<double>(H.array.size());
        };
    } else {
        throw ConfigError("unknown estimator \"" + config.estimator + "\"");
    }
    if (config.reference != "auto" && config.reference != est.oracle)
        throw ConfigError("estimator " + config.estimator + " declares oracle " + est.oracle +
                          ", not " + config.reference);
    if (est.scale == 0) est.scale = 1;
    return est;
}

std::vector<double> run_trials(const Estimator& est, const ExperimentConfig& config, int k) {
    std::vector<double> estimates(config.trials, 0.0);
    std::vector<std::string> errors(config.trials);
    parallel_for(config.trials, [&](int i) {
        try {
            estimates[i] =
                est.run(k, rng::derive(config.master_seed, config.estimator, i));
        } catch (const std::exception& e) {
            errors[i] = e.what();
        }
    });
    for (const auto& e : errors)
        if (!e.empty()) throw CapacityError("trial failed: " + e);
    return estimates;
}

} // namespace

TrialReport run_concentration(const Instance& instance, const ExperimentConfig& config) {
    if (config.trials < 1) throw ConfigError("run_concentration: trials must be >= 1");
    if (config.k < 1) throw ConfigError("run_concentration: k must be >= 1");
    const auto started = std::chrono::steady_clock::now();
    Estimator est = make_estimator(instance, config);

    TrialReport report;
    report.estimates = run_trials(est, config, config.k);
    report.reference = est.reference;
    report.oracle = est.oracle;
    report.threshold = config.eps * est.scale;

    std::vector<double> dev(report.estimates.size());
    for (std::size_t i = 0; i < dev.size(); ++i)
        dev[i] = std::fabs(report.estimates[i] - est.reference);
    int failures = 0;
    for (double d : dev) failures += d > report.threshold;
    report.failure_rate = static_cast<double>(failures) / dev.size();
    std::sort(dev.begin(), dev.end());
    auto quant = [&](double p) {
        const double pos = p * (dev.size() - 1);
        const std::size_t lo = static_cast<std::size_t>(pos);
        const std::size_t hi = std::min(lo + 1, dev.size() - 1);
        return dev[lo] * (1 - (pos - lo)) + dev[hi] * (pos - lo);
    };
    report.quantiles["q50"] = quant(0.5);
    report.quantiles["q90"] = quant(0.9);
    report.quantiles["max"] = dev.back();
    report.wall_ms = std::chrono::duration<double, std::milli>(
                         std::chrono::steady_clock::now() - started)
                         .count();
    return report;
}

std::vector<BetaCurveRow> beta_curve(const Instance& instance, const ExperimentConfig& config) {
    if (config.eps_grid.empty()) throw ConfigError("beta_curve: eps grid required");
    Estimator est = make_estimator(instance, config);
    std::vector<BetaCurveRow> rows;
    int k_min = 2;
    if (instance.kernel) k_min = std::max(k_min, instance.kernel->r());
    if (instance.rarray) k_min = std::max(k_min, instance.rarray->r());
    for (double eps : config.eps_grid) {
        BetaCurveRow row;
        row.eps = eps;
        const double threshold = eps * est.scale;
        for (int k = k_min; k <= config.k_max; k *= 2) {
            std::vector<double> estimates = run_trials(est, config, k);
            int failures = 0;
            for (double e : estimates) failures += std::fabs(e - est.reference) > threshold;
            const double rate = static_cast<double>(failures) / estimates.size();
            if (rate < eps) {
                row.k_star = k;
                row.failure_rate = rate;
                break;
            }
            row.failure_rate = rate;
        }
        rows.push_back(row);
    }
    return rows;
}

json beta_rows_to_json(const std::vector<BetaCurveRow>& rows, const ExperimentConfig& config) {
    json arr = json::array();
    for (const auto& row : rows) {
        json r{{"eps", row.eps}, {"failure_rate", row.failure_rate}};
        if (row.k_star > 0)
            r["k_star"] = row.k_star;
        else
            r["k_star"] = nullptr;
        arr.push_back(r);
    }
    return json{{"config_echo", config.echo()}, {"rows", arr}, {"seed", config.master_seed}};
}

std::string beta_rows_to_csv(const std::vector<BetaCurveRow>& rows) {
    std::string out = "eps,k_star,failure_rate\n";
    char buf[96];
    for (const auto& row : rows) {
        if (row.k_star > 0)
            std::snprintf(buf, sizeof buf, "%.17g,%d,%.17g\n", row.eps, row.k_star,
                          row.failure_rate);
        else
            std::snprintf(buf, sizeof buf, "%.17g,open,%.17g\n", row.eps, row.failure_rate);
        out += buf;
    }
    return out;
}

} // namespace gselab
