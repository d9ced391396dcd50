#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "gselab/core.hpp"
#include "gselab/graphon.hpp"

namespace gselab {

// Edge decoration: a lookup table over a finite color palette, or a
// polynomial in the (real) host entry. Undecorated edges act as the
// constant 1.
struct Decoration {
    enum class Mode { Table, Poly };
    Mode mode = Mode::Table;
    std::vector<double> data; // per color, or polynomial coefficients

    double apply(double host_value) const;
    double sup_norm() const;
};

// Function-decorated template graph on vertex set [k]. Table decorations
// must stay within sup norm 1.
class DecoratedTemplate {
public:
    DecoratedTemplate(int k, int r);

    int k() const { return k_; }
    int r() const { return r_; }
    const std::map<std::vector<int>, Decoration>& edges() const { return edges_; }

    void decorate(std::vector<int> edge, Decoration d);
    double inf_norm() const; // max sup norm over decorated edges

private:
    int k_, r_;
    std::map<std::vector<int>, Decoration> edges_;
};

// t(F, G): average over all vertex maps of the product of decorated entries.
double t_hom(const DecoratedTemplate& F, const RArray& G);

// Injective variant, normalized by the falling factorial.
double t_inj(const DecoratedTemplate& F, const RArray& G);

// Unnormalized sums over all / injective maps.
double hom_sum(const DecoratedTemplate& F, const RArray& G);
double inj_sum(const DecoratedTemplate& F, const RArray& G);

// inj(F,G) via the signed partition sum
// sum_P (-1)^{|V(F)|-|P|} prod_{S in P} (|S|-1)! hom(F/P, G),
// quotient edges multiplying their decorations. Guard |V(F)| <= 4.
double inj_via_partitions(const DecoratedTemplate& F, const RArray& G);

// Forward identity inj(F,G) = sum_P hom(F/P, G).
double inj_forward_sum(const DecoratedTemplate& F, const RArray& G);

// Exact density against a step kernel (mass-weighted map average).
double t_hom_kernel(const DecoratedTemplate& F, const StepKernel& W);

struct DensityTrials {
    std::vector<double> estimates;
    double reference = 0;
};

// Per-trial t(F, .) on induced k-vertex samples of the host array; the
// reference is the exact density on the host.
DensityTrials density_estimate(const DecoratedTemplate& F, const RArray& G, int k,
                               int trials, std::uint64_t seed);
// Same against a step kernel host, sampling with replacement.
DensityTrials density_estimate(const DecoratedTemplate& F, const StepKernel& W, int k,
                               int trials, std::uint64_t seed);

} // namespace gselab
