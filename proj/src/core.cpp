#include "gselab/core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace gselab {

std::size_t checked_pow(std::size_t base, int exp, std::size_t limit) {
    std::size_t out = 1;
    for (int i = 0; i < exp; ++i) {
        if (out > limit / base) return limit + 1;
        out *= base;
    }
    return out;
}

bool next_tuple(std::vector<int>& t, int k) {
    for (int j = static_cast<int>(t.size()) - 1; j >= 0; --j) {
        if (++t[j] < k) return true;
        t[j] = 0;
    }
    return false;
}

bool has_repeat(const std::vector<int>& t) {
    for (std::size_t i = 0; i < t.size(); ++i)
        for (std::size_t j = i + 1; j < t.size(); ++j)
            if (t[i] == t[j]) return true;
    return false;
}

RArray::RArray(int r, int k, std::vector<double> values)
    : r_(r), k_(k), values_(std::move(values)) {
    if (r < 1) throw ArgumentError("RArray: arity must be >= 1");
    if (k < 1) throw ArgumentError("RArray: vertex count must be >= 1");
    std::size_t need = checked_pow(static_cast<std::size_t>(k), r, std::size_t(1) << 31);
    if (values_.size() != need)
        throw DimensionError("RArray: expected k^r values, got " + std::to_string(values_.size()));
    for (double v : values_)
        if (!std::isfinite(v)) throw DomainError("RArray: entries must be finite");
}

RArray RArray::constant(int r, int k, double value) {
    std::size_t n = checked_pow(static_cast<std::size_t>(k), r, std::size_t(1) << 31);
    return RArray(r, k, std::vector<double>(n, value));
}

std::size_t RArray::flat_index(const std::vector<int>& tuple) const {
    std::size_t idx = 0;
    for (int c : tuple) idx = idx * k_ + static_cast<std::size_t>(c);
    return idx;
}

double RArray::inf_norm() const {
    double m = 0;
    for (double v : values_) m = std::max(m, std::fabs(v));
    return m;
}

double RArray::l2_norm() const {
    double s = 0;
    for (double v : values_) s += v * v;
    return std::sqrt(s / static_cast<double>(values_.size()));
}

LayeredRArray::LayeredRArray(std::vector<RArray> layers, std::vector<std::string> names)
    : layers_(std::move(layers)), names_(std::move(names)) {
    if (layers_.empty()) throw ArgumentError("LayeredRArray: layer set must be nonempty");
    for (const RArray& a : layers_)
        if (a.r() != layers_.front().r() || a.k() != layers_.front().k())
            throw DimensionError("LayeredRArray: all layers must share (r, k)");
    if (names_.empty()) {
        names_.reserve(layers_.size());
        for (std::size_t i = 0; i < layers_.size(); ++i) names_.push_back(std::to_string(i));
    }
    if (names_.size() != layers_.size())
        throw DimensionError("LayeredRArray: one name per layer required");
}

LayeredRArray LayeredRArray::single(RArray layer) {
    std::vector<RArray> ls;
    ls.push_back(std::move(layer));
    return LayeredRArray(std::move(ls));
}

double LayeredRArray::inf_norm() const {
    double m = 0;
    for (const RArray& a : layers_) m = std::max(m, a.inf_norm());
    return m;
}

InteractionArray InteractionArray::real(int q, int r, std::vector<double> coefficients) {
    if (q < 1 || r < 1) throw ArgumentError("InteractionArray: q and r must be >= 1");
    std::size_t need = checked_pow(static_cast<std::size_t>(q), r, std::size_t(1) << 31);
    if (coefficients.size() != need)
        throw DimensionError("InteractionArray: expected q^r coefficients");
    InteractionArray J;
    J.q_ = q;
    J.r_ = r;
    J.coeffs_ = std::move(coefficients);
    return J;
}

InteractionArray InteractionArray::color_table(int q, int r, int colors,
                                               std::vector<std::vector<double>> tables) {
    if (colors < 1) throw ArgumentError("InteractionArray: color set must be nonempty");
    std::size_t need = checked_pow(static_cast<std::size_t>(q), r, std::size_t(1) << 31);
    if (tables.size() != need)
        throw DimensionError("InteractionArray: expected q^r lookup tables");
    for (const auto& t : tables)
        if (t.size() != static_cast<std::size_t>(colors))
            throw DimensionError("InteractionArray: each table needs one entry per color");
    InteractionArray J;
    J.q_ = q;
    J.r_ = r;
    J.table_kind_ = true;
    J.colors_ = colors;
    J.tables_ = std::move(tables);
    return J;
}

InteractionArray InteractionArray::unit(int q, int r, std::size_t cell) {
    std::size_t n = checked_pow(static_cast<std::size_t>(q), r, std::size_t(1) << 31);
    std::vector<double> c(n, 0.0);
    c.at(cell) = 1.0;
    return real(q, r, std::move(c));
}

double InteractionArray::table_value(std::size_t cell, double color_id) const {
    const auto& t = tables_[cell];
    double rounded = std::nearbyint(color_id);
    if (std::fabs(color_id - rounded) > 1e-9 || rounded < 0 ||
        rounded >= static_cast<double>(t.size()))
        throw DomainError("InteractionArray: color " + std::to_string(color_id) +
                          " has no table entry");
    return t[static_cast<std::size_t>(rounded)];
}

double InteractionArray::inf_norm() const {
    double m = 0;
    if (table_kind_) {
        for (const auto& t : tables_)
            for (double v : t) m = std::max(m, std::fabs(v));
    } else {
        for (double v : coeffs_) m = std::max(m, std::fabs(v));
    }
    return m;
}

LayeredInteraction canonical_interaction(int q, int r) {
    std::size_t n = checked_pow(static_cast<std::size_t>(q), r, std::size_t(1) << 31);
    LayeredInteraction J;
    J.reserve(n);
    for (std::size_t z = 0; z < n; ++z) J.push_back(InteractionArray::unit(q, r, z));
    return J;
}

double inf_norm(const LayeredInteraction& J) {
    double m = 0;
    for (const auto& j : J) m = std::max(m, j.inf_norm());
    return m;
}

FractionalPartition FractionalPartition::checked(int k, int q, std::vector<double> weights) {
    if (k < 1 || q < 1) throw ArgumentError("FractionalPartition: k and q must be >= 1");
    if (weights.size() != static_cast<std::size_t>(k) * q)
        throw DimensionError("FractionalPartition: expected k*q weights");
    for (int n = 0; n < k; ++n) {
        double s = 0;
        for (int m = 0; m < q; ++m) {
            double v = weights[static_cast<std::size_t>(n) * q + m];
            if (v < -1e-12 || v > 1 + 1e-12)
                throw DomainError("FractionalPartition: weight outside [0,1]");
            s += v;
        }
        if (std::fabs(s - 1.0) > 1e-12)
            throw DomainError("FractionalPartition: row " + std::to_string(n) +
                              " sums to " + std::to_string(s));
    }
    return FractionalPartition(k, q, std::move(weights));
}

FractionalPartition FractionalPartition::normalized(int k, int q, std::vector<double> weights) {
    if (k < 1 || q < 1) throw ArgumentError("FractionalPartition: k and q must be >= 1");
    if (weights.size() != static_cast<std::size_t>(k) * q)
        throw DimensionError("FractionalPartition: expected k*q weights");
    for (int n = 0; n < k; ++n) {
        double s = 0;
        for (int m = 0; m < q; ++m) s += weights[static_cast<std::size_t>(n) * q + m];
        if (s <= 0) throw DomainError("FractionalPartition: row sum must be positive");
        for (int m = 0; m < q; ++m) weights[static_cast<std::size_t>(n) * q + m] /= s;
    }
    return FractionalPartition(k, q, std::move(weights));
}

std::vector<double> FractionalPartition::column_means() const {
    std::vector<double> c(q_, 0.0);
    for (int n = 0; n < k_; ++n)
        for (int m = 0; m < q_; ++m) c[m] += at(n, m);
    for (double& v : c) v /= k_;
    return c;
}

bool FractionalPartition::is_integer(double tol) const {
    for (double v : w_)
        if (std::fabs(v) > tol && std::fabs(v - 1.0) > tol) return false;
    return true;
}

FractionalPartition FractionalPartition::with_row(int n, const std::vector<double>& row) const {
    std::vector<double> w = w_;
    for (int m = 0; m < q_; ++m) w[static_cast<std::size_t>(n) * q_ + m] = row[m];
    return checked(k_, q_, std::move(w));
}

IntegerPartition::IntegerPartition(int k, int q, std::vector<int> assignment)
    : k_(k), q_(q), assign_(std::move(assignment)) {
    if (assign_.size() != static_cast<std::size_t>(k))
        throw DimensionError("IntegerPartition: one state per vertex required");
    for (int s : assign_)
        if (s < 0 || s >= q) throw DomainError("IntegerPartition: state out of range");
}

FractionalPartition IntegerPartition::to_fractional() const {
    std::vector<double> w(static_cast<std::size_t>(k_) * q_, 0.0);
    for (int n = 0; n < k_; ++n) w[static_cast<std::size_t>(n) * q_ + assign_[n]] = 1.0;
    return FractionalPartition::checked(k_, q_, std::move(w));
}

std::vector<int> IntegerPartition::class_counts() const {
    std::vector<int> c(q_, 0);
    for (int s : assign_) ++c[s];
    return c;
}

StateDistribution::StateDistribution(int q, std::vector<double> masses)
    : q_(q), a_(std::move(masses)) {
    if (a_.size() != static_cast<std::size_t>(q))
        throw DimensionError("StateDistribution: expected q masses");
    double s = 0;
    for (double v : a_) {
        if (v < -1e-12) throw DomainError("StateDistribution: masses must be nonnegative");
        s += v;
    }
    if (std::fabs(s - 1.0) > 1e-12)
        throw DomainError("StateDistribution: masses sum to " + std::to_string(s));
}

double StateDistribution::l1_distance(const StateDistribution& other) const {
    if (other.q_ != q_) throw DimensionError("StateDistribution: mismatched q");
    double s = 0;
    for (int i = 0; i < q_; ++i) s += std::fabs(a_[i] - other.a_[i]);
    return s;
}

namespace {

void check_shapes(const RArray& G, const InteractionArray& J, int xk, int xq) {
    if (G.r() != J.r()) throw DimensionError("energy: arity of G and J disagree");
    if (G.k() != xk) throw DimensionError("energy: vertex counts of G and x disagree");
    if (J.q() != xq) throw DimensionError("energy: state counts of J and x disagree");
}

// Fold G against x one axis at a time, producing the [q]^r tensor
// M_z = sum_n G_n prod_j x_{n_j, z_j} with z in lexicographic layout.
std::vector<double> contract_all_axes(const RArray& G, const FractionalPartition& x) {
    const int k = G.k(), q = x.q(), r = G.r();
    std::vector<double> buf = G.values();
    std::size_t qt = 1; // q^(number of axes already contracted)
    for (int t = 0; t < r; ++t) {
        std::size_t prefix = buf.size() / (static_cast<std::size_t>(k) * qt);
        std::vector<double> out(prefix * q * qt, 0.0);
        for (std::size_t p = 0; p < prefix; ++p) {
            for (int m = 0; m < k; ++m) {
                const double* src = buf.data() + (p * k + m) * qt;
                for (int z = 0; z < q; ++z) {
                    const double w = x.at(m, z);
                    if (w == 0.0) continue;
                    double* dst = out.data() + (p * q + z) * qt;
                    for (std::size_t i = 0; i < qt; ++i) dst[i] += src[i] * w;
                }
            }
        }
        buf = std::move(out);
        qt *= q;
    }
    return buf;
}

} // namespace

namespace {

// table interactions evaluate cell by cell: z-major over [q]^r, then the
// per-layer color lookup contracted against x
double energy_raw_table(const RArray& G, const InteractionArray& J,
                        const FractionalPartition& x) {
    const int k = G.k(), r = G.r(), q = J.q();
    std::vector<int> z(r, 0);
    std::vector<int> n(r, 0);
    std::size_t cell = 0;
    double s = 0;
    do {
        std::fill(n.begin(), n.end(), 0);
        std::size_t flat = 0;
        do {
            double prod = J.table_value(cell, G.at(flat));
            for (int j = 0; j < r && prod != 0.0; ++j) prod *= x.at(n[j], z[j]);
            s += prod;
            ++flat;
        } while (next_tuple(n, k));
        ++cell;
    } while (next_tuple(z, q));
    return s;
}

// undivided sum; the caller normalizes by k^r exactly once
double energy_raw(const RArray& G, const InteractionArray& J, const FractionalPartition& x) {
    check_shapes(G, J, x.k(), x.q());
    if (J.is_table()) return energy_raw_table(G, J, x);
    std::vector<double> M = contract_all_axes(G, x);
    double s = 0;
    for (std::size_t z = 0; z < M.size(); ++z) s += J.coeff(z) * M[z];
    return s;
}

double energy_raw(const RArray& G, const InteractionArray& J, const IntegerPartition& x) {
    check_shapes(G, J, x.k(), x.q());
    const int k = G.k(), r = G.r(), q = J.q();
    std::vector<int> t(r, 0);
    double s = 0;
    std::size_t flat = 0;
    do {
        std::size_t cell = 0;
        for (int j = 0; j < r; ++j) cell = cell * q + static_cast<std::size_t>(x.state(t[j]));
        s += J.is_table() ? J.table_value(cell, G.at(flat)) : J.coeff(cell) * G.at(flat);
        ++flat;
    } while (next_tuple(t, k));
    return s;
}

void check_layers(const LayeredRArray& W, const LayeredInteraction& J) {
    if (J.size() != W.layer_count())
        throw DimensionError("layered energy: layer sets of W and J disagree");
}

} // namespace

double energy(const RArray& G, const InteractionArray& J, const FractionalPartition& x) {
    return energy_raw(G, J, x) / static_cast<double>(G.size());
}

double energy(const RArray& G, const InteractionArray& J, const IntegerPartition& x) {
    return energy_raw(G, J, x) / static_cast<double>(G.size());
}

double layered_energy(const LayeredRArray& W, const LayeredInteraction& J,
                      const FractionalPartition& x) {
    check_layers(W, J);
    double s = 0;
    for (std::size_t e = 0; e < J.size(); ++e) s += energy_raw(W.layer(e), J[e], x);
    return s / static_cast<double>(W.layer(0).size());
}

double layered_energy(const LayeredRArray& W, const LayeredInteraction& J,
                      const IntegerPartition& x) {
    check_layers(W, J);
    double s = 0;
    for (std::size_t e = 0; e < J.size(); ++e) s += energy_raw(W.layer(e), J[e], x);
    return s / static_cast<double>(W.layer(0).size());
}

std::vector<double> energy_row_gradient(const LayeredRArray& W, const LayeredInteraction& J,
                                        const FractionalPartition& x, int v) {
    check_layers(W, J);
    const int k = W.k(), r = W.r(), q = x.q();
    std::vector<double> g(q, 0.0);
    std::vector<int> n(r, 0);
    std::vector<int> z(r, 0);
    const double norm = static_cast<double>(checked_pow(k, r, std::size_t(1) << 62));
    do {
        bool touches = false;
        for (int j = 0; j < r; ++j) touches |= (n[j] == v);
        if (!touches) continue;
        for (std::size_t e = 0; e < J.size(); ++e) {
            const double gv = W.layer(e).at(n);
            if (gv == 0.0) continue;
            std::fill(z.begin(), z.end(), 0);
            std::size_t cell = 0;
            do {
                cell = 0;
                for (int j = 0; j < r; ++j) cell = cell * q + z[j];
                const double jz = J[e].coeff(cell);
                if (jz != 0.0) {
                    const double base = jz * gv;
                    for (int j = 0; j < r; ++j) {
                        if (n[j] != v) continue;
                        double prod = base;
                        for (int j2 = 0; j2 < r; ++j2)
                            if (j2 != j) prod *= x.at(n[j2], z[j2]);
                        g[z[j]] += prod;
                    }
                }
            } while (next_tuple(z, q));
        }
    } while (next_tuple(n, k));
    for (double& gv : g) gv /= norm;
    return g;
}

double energy_row_terms(const LayeredRArray& W, const LayeredInteraction& J,
                        const FractionalPartition& x, int v, const std::vector<double>& row) {
    check_layers(W, J);
    const int k = W.k(), r = W.r(), q = x.q();
    std::vector<int> n(r, 0);
    std::vector<int> z(r, 0);
    const double norm = static_cast<double>(checked_pow(k, r, std::size_t(1) << 62));
    double s = 0;
    do {
        bool touches = false;
        for (int j = 0; j < r; ++j) touches |= (n[j] == v);
        if (!touches) continue;
        for (std::size_t e = 0; e < J.size(); ++e) {
            const double gv = W.layer(e).at(n);
            if (gv == 0.0) continue;
            std::fill(z.begin(), z.end(), 0);
            do {
                std::size_t cell = 0;
                for (int j = 0; j < r; ++j) cell = cell * q + z[j];
                const double jz = J[e].coeff(cell);
                if (jz == 0.0) continue;
                double prod = jz * gv;
                for (int j = 0; j < r; ++j)
                    prod *= (n[j] == v) ? row[z[j]] : x.at(n[j], z[j]);
                s += prod;
            } while (next_tuple(z, q));
        }
    } while (next_tuple(n, k));
    return s / norm;
}

LayeredRArray canonical_form(const LayeredRArray& W, const LayeredInteraction& J) {
    check_layers(W, J);
    for (const auto& j : J)
        if (!j.is_table())
            throw ArgumentError("canonical_form: interactions must be color tables");
    const int q = J.front().q();
    const int r = W.r();
    const std::size_t cells = checked_pow(static_cast<std::size_t>(q), r, std::size_t(1) << 31);
    std::vector<RArray> out;
    std::vector<std::string> names;
    out.reserve(cells);
    std::vector<int> z(r, 0);
    for (std::size_t cell = 0; cell < cells; ++cell) {
        std::vector<double> vals(W.layer(0).size(), 0.0);
        for (std::size_t e = 0; e < J.size(); ++e) {
            const RArray& layer = W.layer(e);
            for (std::size_t i = 0; i < vals.size(); ++i)
                vals[i] += J[e].table_value(cell, layer.at(i));
        }
        out.emplace_back(r, W.k(), std::move(vals));
        std::string name = "z";
        for (int j = 0; j < r; ++j) name += (j ? "," : "=") + std::to_string(z[j]);
        names.push_back(name);
        next_tuple(z, q);
    }
    return LayeredRArray(std::move(out), std::move(names));
}

RArray zero_diagonal(const RArray& G) {
    std::vector<double> vals = G.values();
    std::vector<int> t(G.r(), 0);
    std::size_t flat = 0;
    do {
        if (has_repeat(t)) vals[flat] = 0.0;
        ++flat;
    } while (next_tuple(t, G.k()));
    return RArray(G.r(), G.k(), std::move(vals));
}

LayeredRArray zero_diagonal(const LayeredRArray& G) {
    std::vector<RArray> layers;
    layers.reserve(G.layer_count());
    for (std::size_t e = 0; e < G.layer_count(); ++e) layers.push_back(zero_diagonal(G.layer(e)));
    return LayeredRArray(std::move(layers), G.names());
}

bool is_zero_diagonal(const LayeredRArray& G) {
    std::vector<int> t(G.r(), 0);
    std::size_t flat = 0;
    do {
        if (has_repeat(t))
            for (std::size_t e = 0; e < G.layer_count(); ++e)
                if (G.layer(e).at(flat) != 0.0) return false;
        ++flat;
    } while (next_tuple(t, G.k()));
    return true;
}

} // namespace gselab
