#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "gselab/core.hpp"
#include "gselab/graphon.hpp"
#include "gselab/io.hpp"

namespace gselab {

// Fully determines all randomness: trial i runs with the seed derived as
// hash(master_seed, estimator, i).
struct ExperimentConfig {
    std::uint64_t master_seed = 0;
    std::string estimator;           // gse | max-csp | edge-density | cutnorm
    std::string reference = "auto";  // exact | derived:ascent | auto
    int k = 0;
    int trials = 0;
    double eps = 0;
    std::vector<double> eps_grid;
    int k_max = 64;                  // beta-curve doubling cap
    int solver_restarts = 8;         // local solver inside estimators
    int oracle_grid = 16;            // lattice resolution of the derived oracle
    int oracle_restarts = 50;

    nlohmann::json echo() const;
};

struct TrialReport {
    std::vector<double> estimates;
    double reference = 0;
    std::string oracle;
    double threshold = 0;
    double failure_rate = 0;
    std::map<std::string, double> quantiles; // of |estimate - reference|
    double wall_ms = 0;                      // never serialized

    nlohmann::json to_json(const ExperimentConfig& config) const;
};

struct BetaCurveRow {
    double eps = 0;
    int k_star = -1; // -1 when the budget is exhausted (reported open)
    double failure_rate = 0;
};

// Parallelism cap: GSELAB_THREADS when set, hardware concurrency otherwise.
int thread_cap();

// Deterministic parallel map: results land by index, so aggregation is
// independent of scheduling.
void parallel_for(int n, const std::function<void(int)>& body);

// Brute-force reference for the fractional GSE of a step kernel: a simplex
// lattice scan over the per-cell rows followed by coordinate-ascent polish
// from the best lattice points and seeded restarts. Mass-weighted rows.
double stepkernel_gse_reference(const StepKernel& W, const InteractionArray& J,
                                int grid, int restarts, std::uint64_t seed);

// Empirical concentration run: per-trial estimates against the declared
// reference oracle, failure rate at the threshold
// eps * |E| * ||J||inf * ||W||inf (or plain eps when no interaction scale
// applies).
TrialReport run_concentration(const Instance& instance, const ExperimentConfig& config);

// Smallest k in a doubling schedule whose empirical failure rate is below
// eps, for each eps in the grid.
std::vector<BetaCurveRow> beta_curve(const Instance& instance, const ExperimentConfig& config);

nlohmann::json beta_rows_to_json(const std::vector<BetaCurveRow>& rows,
                                 const ExperimentConfig& config);
std::string beta_rows_to_csv(const std::vector<BetaCurveRow>& rows);

} // namespace gselab
