#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "gselab/core.hpp"

namespace gselab {

// Step-function kernel on [0,1]^r: m cells per axis with masses lambda_i
// summing to 1 and a real value per cell tuple. This is the naive (and
// averaged naive) graphon form, which depends on singleton coordinates only.
class StepKernel {
public:
    StepKernel(int r, std::vector<double> masses, std::vector<double> values);

    int r() const { return r_; }
    int steps() const { return static_cast<int>(masses_.size()); }
    const std::vector<double>& masses() const { return masses_; }
    const std::vector<double>& values() const { return values_; }

    double value_at(const std::vector<int>& cells) const;
    // cell containing u in the cumulative-mass subdivision of [0,1]
    int cell_of(double u) const;
    double cell_mass(const std::vector<int>& cells) const;

    double inf_norm() const;
    // mass-weighted 2-norm (sqrt of sum value^2 * cell mass)
    double l2_norm() const;
    // mass-weighted 1-norm
    double l1_norm() const;

private:
    int r_;
    std::vector<double> masses_;
    std::vector<double> cumulative_;
    std::vector<double> values_;
};

// Full step graphon: one coordinate per nonempty subset S of [r] (bitmask
// order; the empty set optionally first for exchangeable-array mode), each
// with a uniform grid of g_S cells. Values are real, or color ids when
// color_count > 0.
class FullStepGraphon {
public:
    // granularity[mask] for mask in 0..2^r-1; granularity[0] == 0 means no
    // empty-set coordinate. All nonempty masks need granularity >= 1.
    FullStepGraphon(int r, std::vector<int> granularity, std::vector<double> values,
                    int color_count = 0);

    int r() const { return r_; }
    bool has_empty_coordinate() const { return granularity_[0] > 0; }
    bool real_valued() const { return color_count_ == 0; }
    int color_count() const { return color_count_; }
    const std::vector<int>& granularity() const { return granularity_; }
    const std::vector<double>& values() const { return values_; }

    // cells indexed by mask; masks with granularity 0 are ignored
    double value_at(const std::vector<int>& cells) const;

    double inf_norm() const;

private:
    int r_;
    std::vector<int> granularity_;
    std::vector<double> values_;
    int color_count_;
};

// A vertex sample together with the singleton uniforms that generated it.
// Uniforms for larger subsets are pure functions of (seed, subset) and are
// regenerated on demand, so the record is enough to replay bit-exactly.
struct SampledGraph {
    RArray array;
    std::vector<double> singleton_uniforms;
    std::uint64_t seed;
};

// G(k, W): edge (i_1..i_r) evaluates W with coordinate S <= [r] receiving the
// uniform of the vertex subset {i_j : j in S}. Repeated indices collapse the
// subset, so diagonal entries reuse singleton uniforms.
SampledGraph sample_g(const StepKernel& W, int k, std::uint64_t seed);
SampledGraph sample_g(const FullStepGraphon& W, int k, std::uint64_t seed);

// H(k, W): the averaged sample. Singleton coordinates are pinned at the
// sampled cells; every coordinate indexed by a subset of size >= 2 is
// replaced by its uniform cell average. Coincides with sample_g on naive
// kernels.
SampledGraph sample_h(const StepKernel& W, int k, std::uint64_t seed);
SampledGraph sample_h(const FullStepGraphon& W, int k, std::uint64_t seed);

// G and H built from the same uniform family (identical singleton uniforms).
std::pair<SampledGraph, SampledGraph> coupled_samples(const StepKernel& W, int k,
                                                      std::uint64_t seed);
std::pair<SampledGraph, SampledGraph> coupled_samples(const FullStepGraphon& W, int k,
                                                      std::uint64_t seed);

// Exchangeable n^r array H_e = f(U_empty, U_{i_1}, ..., U_e); requires the
// empty-set coordinate.
RArray samp_exchangeable(const FullStepGraphon& f, int n, std::uint64_t seed);

// Step kernel of a finite r-graph: k cells of mass 1/k, values copied from
// G with diagonal cells zeroed.
StepKernel graphon_of_graph(const RArray& G);

// Plain embedding of an array as a uniform-mass kernel (no diagonal zeroing);
// used for cost arrays.
StepKernel stepkernel_of_array(const RArray& A);

// Induced sub-r-graph on k distinct vertices, chosen by a seeded
// Fisher-Yates pass and relabeled in ascending vertex order.
SampledGraph sample_without_replacement(const RArray& G, int k, std::uint64_t seed);

} // namespace gselab
