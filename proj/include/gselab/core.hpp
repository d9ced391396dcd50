#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gselab/errors.hpp"

namespace gselab {

// Dense real r-array on vertex set [k], row-major. Entries of color-valued
// arrays are stored as integral color ids in the same container.
class RArray {
public:
    RArray(int r, int k, std::vector<double> values);
    static RArray constant(int r, int k, double value);

    int r() const { return r_; }
    int k() const { return k_; }
    std::size_t size() const { return values_.size(); }
    const std::vector<double>& values() const { return values_; }

    double at(std::size_t flat) const { return values_[flat]; }
    double at(const std::vector<int>& tuple) const { return values_[flat_index(tuple)]; }
    std::size_t flat_index(const std::vector<int>& tuple) const;

    double inf_norm() const;
    // (1/k^r * sum A^2)^{1/2}; the uniform-mass kernel embedding of the array.
    double l2_norm() const;

private:
    int r_;
    int k_;
    std::vector<double> values_;
};

// Tuple odometer over [k]^r, lexicographic. Start from (0,...,0); returns
// false after the last tuple.
bool next_tuple(std::vector<int>& t, int k);

// True if the tuple has at least two equal coordinates.
bool has_repeat(const std::vector<int>& t);

// Finite layer set of same-shape arrays. Layer names default to decimal
// indices; layered operations require identical name sequences.
class LayeredRArray {
public:
    explicit LayeredRArray(std::vector<RArray> layers,
                           std::vector<std::string> names = {});
    static LayeredRArray single(RArray layer);

    int r() const { return layers_.front().r(); }
    int k() const { return layers_.front().k(); }
    std::size_t layer_count() const { return layers_.size(); }
    const RArray& layer(std::size_t e) const { return layers_[e]; }
    const std::vector<std::string>& names() const { return names_; }

    double inf_norm() const;

private:
    std::vector<RArray> layers_;
    std::vector<std::string> names_;
};

// Interaction coefficients J indexed by state tuples z in [q]^r. Either a
// plain real coefficient per cell, or a lookup table over a finite color set
// (the finite realization of the paper-facing C(K) entries).
class InteractionArray {
public:
    static InteractionArray real(int q, int r, std::vector<double> coefficients);
    static InteractionArray color_table(int q, int r, int colors,
                                        std::vector<std::vector<double>> tables);
    // Identity coefficient 1 at `cell`, 0 elsewhere.
    static InteractionArray unit(int q, int r, std::size_t cell);

    int q() const { return q_; }
    int r() const { return r_; }
    bool is_table() const { return table_kind_; }
    int colors() const { return colors_; }
    std::size_t cells() const { return coeffs_.empty() ? tables_.size() : coeffs_.size(); }

    double coeff(std::size_t cell) const { return coeffs_[cell]; }
    double table_value(std::size_t cell, double color_id) const;

    double inf_norm() const;

private:
    InteractionArray() = default;
    int q_ = 0;
    int r_ = 0;
    bool table_kind_ = false;
    int colors_ = 0;
    std::vector<double> coeffs_;
    std::vector<std::vector<double>> tables_;
};

using LayeredInteraction = std::vector<InteractionArray>;

// Canonical interactions for a [q]^r-layered instance: layer z carries the
// unit coefficient at cell z.
LayeredInteraction canonical_interaction(int q, int r);

// Row-stochastic k x q assignment weights.
class FractionalPartition {
public:
    // Rejects rows whose sum is off by more than 1e-12.
    static FractionalPartition checked(int k, int q, std::vector<double> weights);
    // Rescales each row to sum 1; rejects nonpositive row sums.
    static FractionalPartition normalized(int k, int q, std::vector<double> weights);

    int k() const { return k_; }
    int q() const { return q_; }
    double at(int n, int m) const { return w_[static_cast<std::size_t>(n) * q_ + m]; }
    const std::vector<double>& weights() const { return w_; }

    std::vector<double> column_means() const;
    bool is_integer(double tol = 1e-12) const;

    FractionalPartition with_row(int n, const std::vector<double>& row) const;

private:
    FractionalPartition(int k, int q, std::vector<double> w)
        : k_(k), q_(q), w_(std::move(w)) {}
    int k_;
    int q_;
    std::vector<double> w_;
};

class IntegerPartition {
public:
    IntegerPartition(int k, int q, std::vector<int> assignment);

    int k() const { return k_; }
    int q() const { return q_; }
    int state(int n) const { return assign_[n]; }
    const std::vector<int>& assignment() const { return assign_; }

    FractionalPartition to_fractional() const;
    std::vector<int> class_counts() const;

private:
    int k_;
    int q_;
    std::vector<int> assign_;
};

// Point of the probability simplex on [q].
class StateDistribution {
public:
    StateDistribution(int q, std::vector<double> masses);

    int q() const { return q_; }
    double at(int i) const { return a_[i]; }
    const std::vector<double>& masses() const { return a_; }

    double l1_distance(const StateDistribution& other) const;

private:
    int q_;
    std::vector<double> a_;
};

// Energy (1/k^r) sum_z sum_n J_z G_n prod_j x_{n_j, z_j}. Evaluated by the
// two-stage contraction: G is folded against x one axis at a time (last axis
// first), then the resulting [q]^r tensor is reduced against J in ascending
// z order. Deterministic summation order; replays bit-exactly.
double energy(const RArray& G, const InteractionArray& J, const FractionalPartition& x);
double energy(const RArray& G, const InteractionArray& J, const IntegerPartition& x);

double layered_energy(const LayeredRArray& W, const LayeredInteraction& J,
                      const FractionalPartition& x);
double layered_energy(const LayeredRArray& W, const LayeredInteraction& J,
                      const IntegerPartition& x);

// Partial derivatives of the energy with respect to row v of x,
// one entry per state. Sums over all tuple positions holding v, so it is
// exact also on arrays with diagonal entries.
std::vector<double> energy_row_gradient(const LayeredRArray& W, const LayeredInteraction& J,
                                        const FractionalPartition& x, int v);

// Energy contribution of all tuples containing vertex v, with row v of x
// replaced by `row`. Used for exact single-row updates.
double energy_row_terms(const LayeredRArray& W, const LayeredInteraction& J,
                        const FractionalPartition& x, int v, const std::vector<double>& row);

// Collapse a color-valued layered instance with table interactions into the
// [q]^r-layered real canonical form: output layer z holds sum_e J^e_z(W^e_n).
// Pairs with canonical_interaction(q, r); energies are preserved exactly.
LayeredRArray canonical_form(const LayeredRArray& W, const LayeredInteraction& J);

// Entries with repeated coordinates set to 0.
RArray zero_diagonal(const RArray& G);
LayeredRArray zero_diagonal(const LayeredRArray& G);
bool is_zero_diagonal(const LayeredRArray& G);

double inf_norm(const LayeredInteraction& J);

std::size_t checked_pow(std::size_t base, int exp, std::size_t limit);

} // namespace gselab
