#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "gselab/core.hpp"
#include "gselab/graphon.hpp"

namespace gselab {

// One subset of indices (or kernel cells) per axis, and the attained
// absolute box sum. Array witnesses carry unnormalized sums; kernel
// witnesses are mass-weighted.
struct CutWitness {
    double value = 0;
    std::vector<std::vector<int>> subsets;
};

// Exact cut norm by enumeration over the subsets of the last r-1 axes with
// the first axis optimized in closed form (an index enters iff its marginal
// matches the target sign). Guard: (r-1) * n <= 24.
CutWitness cut_norm_exact(const RArray& A);
CutWitness cut_norm_exact(const StepKernel& W);

// Alternating-maximization lower bound: fix all axes but one, the optimal
// free subset is sign-determined. Restart 0 starts from full sets, the rest
// from seeded random subsets. Always returns a valid witness.
CutWitness cut_norm_heuristic(const RArray& A, int restarts, std::uint64_t seed);
CutWitness cut_norm_heuristic(const StepKernel& W, int restarts, std::uint64_t seed);

// d_box(F, G) = (1/n^r) ||F - G||_box
double cut_distance(const RArray& F, const RArray& G);

enum class CutOracle { Exact, Heuristic };

struct CutTerm {
    double coeff = 0;
    std::vector<std::vector<int>> subsets;
};

// B = sum_i d_i 1_{S_i^1 x ... x S_i^r} with small-cut-norm remainder.
// Guarantees, with ||W||_2 the mass-weighted 2-norm of the input:
//   s <= ceil(1/eps^2),  sum |d_i| <= ||W||_2 / eps,  monotone 2-norm,
//   per-step 2-norm-squared drop >= eps^2 ||W||_2^2,
// and remainder cut norm < eps ||W||_2 under the certifying oracle.
struct CutDecomposition {
    std::vector<CutTerm> terms;
    std::optional<RArray> remainder_array;
    std::optional<StepKernel> remainder_kernel;
    double certified_remainder_cutnorm = 0;
    bool exact_certificate = false;
    double eps = 0;
    double source_l2 = 0;
    std::vector<double> l2_history; // kernel-unit 2-norm before/after each step
};

CutDecomposition cut_decompose(const RArray& W, double eps, CutOracle oracle,
                               std::uint64_t seed, int heuristic_restarts = 32);
CutDecomposition cut_decompose(const StepKernel& W, double eps, CutOracle oracle,
                               std::uint64_t seed, int heuristic_restarts = 32);

struct DeviationStats {
    std::vector<double> deviations;
    double quantile(double p) const;
    double median() const { return quantile(0.5); }
};

// Per-trial |(1/k^r) ||H(k,W)||_box - ||W||_box| under seeded averaged
// sampling.
DeviationStats cutnorm_sampling_experiment(const StepKernel& W, int k, int trials,
                                           std::uint64_t seed);

} // namespace gselab
