#pragma once

#include <cstdint>
#include <vector>

#include "gselab/core.hpp"

namespace gselab {

// One constraint: a truth table over K^r (stored flat, q^r entries; boolean
// 0/1 in the default integer case, reals in [-d, d] for weighted formulas)
// applied to an ordered r-tuple of variables.
struct Constraint {
    std::vector<double> table;
    std::vector<int> edge;
};

// rCSP formula: a multiset of constraints over n variables with q states.
// The identity of a formula is its evaluation representation; d bounds every
// eval entry.
class Formula {
public:
    Formula(int n, int r, int q, int d, std::vector<Constraint> constraints,
            bool weighted = false);

    int n() const { return n_; }
    int r() const { return r_; }
    int q() const { return q_; }
    int d() const { return d_; }
    bool weighted() const { return weighted_; }
    const std::vector<Constraint>& constraints() const { return constraints_; }

    double eval_table(const Constraint& c, const std::vector<int>& states) const;

private:
    int n_, r_, q_, d_;
    bool weighted_;
    std::vector<Constraint> constraints_;
};

// [q]^r-layered array; layer z at edge e counts the constraints on e that z
// satisfies. Throws DomainError when an entry exceeds d.
LayeredRArray eval_rep(const Formula& F);

// Optimum density of MAX-rCSP by direct assignment enumeration
// (guard q^n <= 2e7): max over sigma of (#satisfied)/n^r.
double max_csp_exact(const Formula& F);

// Induced subformula on a uniform k-subset, relabeled to [k] in ascending
// vertex order.
Formula sample_formula(const Formula& F, int k, std::uint64_t seed);

// Density of the tilde-monomial of H against the eval-decorated G:
// average over maps phi of prod_e prod_z eval(G)_{phi(e)}(z)^{eval(H)_e(z)}.
double tilde_density(const Formula& H, const Formula& G);

// Per-trial exact MAX-rCSP densities of seeded induced subformulas.
std::vector<double> estimate_max_csp(const Formula& F, int k, int trials,
                                     std::uint64_t seed);

} // namespace gselab
