#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "gselab/core.hpp"
#include "gselab/graphon.hpp"

namespace gselab {

// (1/n^r) max over permutations rho of sum_i J_i G_{rho(i_1)..rho(i_r)}.
// Guard n <= 9.
double qap_exact(const RArray& G, const RArray& J);

// Maximum acyclic subgraph density
// (1/n^2) max over orderings of sum_{ij} G_ij 1{rho(j) >= rho(i)};
// diagonal terms count as written. Guard n <= 9.
double ac_exact(const RArray& G);

// Rows/columns of a cost kernel embedded in an L^p cube; one point of
// dimension `dim` per kernel cell. p in {1, 2, inf}.
struct Embedding {
    int dim = 1;
    double p = 2; // use INFINITY for the sup metric
    std::vector<double> points; // cell-major, dim coordinates per cell

    double distance(int cell_a, int cell_b) const;
};

enum class ClusterMethod { GeometricGrid, Triangular, Generic };

// Step approximation J' of a cost function with a certified L1 error,
// computed by exact integration over cells.
struct ClusterFit {
    StepKernel approx;
    double l1_error = 0;
    ClusterMethod method = ClusterMethod::Generic;
    double eps = 0;
    bool certified = false;       // l1_error <= eps * ||J||inf
    std::vector<int> cell_class;  // source cell -> class (empty for triangular)
};

// Grid the embedding cube into ceil(2 d^{1/p} / eps) classes per dimension
// and average J over class pairs.
ClusterFit cluster_fit_geometric(const StepKernel& J, const Embedding& embedding, double eps);

// The acyclic-subgraph cost 1{x < y} clustered into q = ceil(2/eps) uniform
// classes with the strict upper-triangular pattern; the error integral is
// analytic.
ClusterFit cluster_fit_triangular(double eps);

// Greedy agglomerative merging of cells minimizing the exact L1 increase,
// while the certificate stays within eps * ||J||inf (or until `max_steps`
// classes when given, in which case certification may fail and is reported).
ClusterFit cluster_fit_generic(const StepKernel& J, double eps, int max_steps = -1);

// Recompute ||J - J'||_1 from scratch for a fit of J (both step kernels over
// a common refinement of cell boundaries is not needed here: fits always
// partition J's own cells).
double cluster_certificate(const StepKernel& J, const ClusterFit& fit,
                           const std::vector<int>& cell_class);

// The supernode instance of the microcanonical reduction: the fitted step
// values as a real r-array on [q] plus the step masses.
struct MicroGseInstance {
    RArray supernode_cost;
    StateDistribution masses;

    InteractionArray interaction() const;
};
MicroGseInstance qap_to_micro(const ClusterFit& fit);

struct QapTrials {
    std::vector<double> estimates;
};

// Two-sample estimator: an independent W-sample and J-sample (distinct
// stream tags), the empirical class distribution b of the J-sample, and the
// microcanonical integer GSE of the W-sample at b.
QapTrials estimate_qap(const StepKernel& W, const ClusterFit& fit, int k, int trials,
                       std::uint64_t seed);

} // namespace gselab
