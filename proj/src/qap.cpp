#include "gselab/qap.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "gselab/gse.hpp"
#include "gselab/rng.hpp"

namespace gselab {

double qap_exact(const RArray& G, const RArray& J) {
    if (G.r() != J.r() || G.k() != J.k())
        throw DimensionError("qap_exact: G and J must have identical shape");
    const int n = G.k(), r = G.r();
    if (n > 9) throw CapacityError("qap_exact: n <= 9 permutation guard exceeded");
    std::vector<int> rho(n);
    std::iota(rho.begin(), rho.end(), 0);
    double best = -std::numeric_limits<double>::infinity();
    std::vector<int> t(r, 0);
    std::vector<int> image(r, 0);
    do {
        double s = 0;
        std::fill(t.begin(), t.end(), 0);
        std::size_t flat = 0;
        do {
            for (int j = 0; j < r; ++j) image[j] = rho[t[j]];
            s += J.at(flat) * G.at(image);
            ++flat;
        } while (next_tuple(t, n));
        best = std::max(best, s);
    } while (std::next_permutation(rho.begin(), rho.end()));
    return best / static_cast<double>(G.size());
}

double ac_exact(const RArray& G) {
    if (G.r() != 2) throw ArgumentError("ac_exact: needs a 2-array");
    const int n = G.k();
    if (n > 9) throw CapacityError("ac_exact: n <= 9 ordering guard exceeded");
    std::vector<int> rho(n);
    std::iota(rho.begin(), rho.end(), 0);
    double best = -std::numeric_limits<double>::infinity();
    do {
        double s = 0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                if (rho[j] >= rho[i]) s += G.at(static_cast<std::size_t>(i) * n + j);
        best = std::max(best, s);
    } while (std::next_permutation(rho.begin(), rho.end()));
    return best / static_cast<double>(G.size());
}

double Embedding::distance(int cell_a, int cell_b) const {
    const double* a = points.data() + static_cast<std::size_t>(cell_a) * dim;
    const double* b = points.data() + static_cast<std::size_t>(cell_b) * dim;
    if (std::isinf(p)) {
        double m = 0;
        for (int t = 0; t < dim; ++t) m = std::max(m, std::fabs(a[t] - b[t]));
        return m;
    }
    if (p == 1) {
        double s = 0;
        for (int t = 0; t < dim; ++t) s += std::fabs(a[t] - b[t]);
        return s;
    }
    double s = 0;
    for (int t = 0; t < dim; ++t) s += (a[t] - b[t]) * (a[t] - b[t]);
    return std::sqrt(s);
}

namespace {

// Mass-weighted class averages of J over a cell partition, plus the exact
// L1 residual of the averaging.
ClusterFit fit_from_classes(const StepKernel& J, const std::vector<int>& cell_class,
                            int classes, double eps, ClusterMethod method) {
    const int r = J.r(), m = J.steps();
    std::vector<double> class_mass(classes, 0.0);
    for (int i = 0; i < m; ++i) class_mass[cell_class[i]] += J.masses()[i];

    const std::size_t cells = checked_pow(static_cast<std::size_t>(classes), r, std::size_t(1) << 31);
    std::vector<double> weighted(cells, 0.0);
    std::vector<double> mass(cells, 0.0);
    std::vector<int> t(r, 0);
    std::size_t flat = 0;
    do {
        double w = 1;
        std::size_t cls = 0;
        for (int j = 0; j < r; ++j) {
            w *= J.masses()[t[j]];
            cls = cls * classes + static_cast<std::size_t>(cell_class[t[j]]);
        }
        weighted[cls] += w * J.values()[flat];
        mass[cls] += w;
        ++flat;
    } while (next_tuple(t, m));
    std::vector<double> avg(cells, 0.0);
    for (std::size_t c = 0; c < cells; ++c)
        if (mass[c] > 0) avg[c] = weighted[c] / mass[c];

    double err = 0;
    std::fill(t.begin(), t.end(), 0);
    flat = 0;
    do {
        double w = 1;
        std::size_t cls = 0;
        for (int j = 0; j < r; ++j) {
            w *= J.masses()[t[j]];
            cls = cls * classes + static_cast<std::size_t>(cell_class[t[j]]);
        }
        err += w * std::fabs(J.values()[flat] - avg[cls]);
        ++flat;
    } while (next_tuple(t, m));

    ClusterFit fit{StepKernel(r, class_mass, avg), err, method, eps,
                   err <= eps * J.inf_norm() + 1e-12, cell_class};
    return fit;
}

std::vector<int> normalize_classes(const std::vector<int>& raw) {
    // compress class ids to 0..c-1 preserving first-appearance order
    std::vector<int> order;
    for (int c : raw)
        if (std::find(order.begin(), order.end(), c) == order.end()) order.push_back(c);
    std::vector<int> out(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i)
        out[i] = static_cast<int>(std::find(order.begin(), order.end(), raw[i]) - order.begin());
    return out;
}

} // namespace

ClusterFit cluster_fit_geometric(const StepKernel& J, const Embedding& embedding, double eps) {
    if (!(eps > 0)) throw ArgumentError("cluster_fit_geometric: eps must be positive");
    const int m = J.steps();
    if (embedding.points.size() != static_cast<std::size_t>(m) * embedding.dim)
        throw DimensionError("cluster_fit_geometric: one point per kernel cell required");
    const double root = std::isinf(embedding.p) ? 1.0
                                                : std::pow(embedding.dim, 1.0 / embedding.p);
    const int beta = static_cast<int>(std::ceil(2.0 * root / eps));
    std::vector<int> raw(m);
    for (int i = 0; i < m; ++i) {
        std::size_t id = 0;
        for (int t = 0; t < embedding.dim; ++t) {
            double coord = embedding.points[static_cast<std::size_t>(i) * embedding.dim + t];
            int g = std::clamp(static_cast<int>(coord * beta), 0, beta - 1);
            id = id * beta + static_cast<std::size_t>(g);
        }
        raw[i] = static_cast<int>(id);
    }
    std::vector<int> cell_class = normalize_classes(raw);
    const int classes = *std::max_element(cell_class.begin(), cell_class.end()) + 1;
    ClusterFit fit = fit_from_classes(J, cell_class, classes, eps, ClusterMethod::GeometricGrid);
    return fit;
}

ClusterFit cluster_fit_triangular(double eps) {
    if (!(eps > 0)) throw ArgumentError("cluster_fit_triangular: eps must be positive");
    const int q = static_cast<int>(std::ceil(2.0 / eps));
    std::vector<double> masses(q, 1.0 / q);
    std::vector<double> values(static_cast<std::size_t>(q) * q, 0.0);
    for (int i = 0; i < q; ++i)
        for (int j = 0; j < q; ++j)
            if (i < j) values[static_cast<std::size_t>(i) * q + j] = 1.0;
    // within each diagonal block the cost is 1 above the true diagonal:
    // the residual integrates to q * 1/(2 q^2)
    const double err = 1.0 / (2.0 * q);
    return ClusterFit{StepKernel(2, std::move(masses), std::move(values)), err,
                      ClusterMethod::Triangular, eps, err <= eps + 1e-12};
}

ClusterFit cluster_fit_generic(const StepKernel& J, double eps, int max_steps) {
    if (!(eps > 0)) throw ArgumentError("cluster_fit_generic: eps must be positive");
    const int m = J.steps();
    std::vector<int> cell_class(m);
    std::iota(cell_class.begin(), cell_class.end(), 0);
    int classes = m;
    ClusterFit best = fit_from_classes(J, cell_class, classes, eps, ClusterMethod::Generic);
    const double budget = eps * J.inf_norm() + 1e-12;

    while (classes > 1) {
        double best_err = std::numeric_limits<double>::infinity();
        std::pair<int, int> best_pair{-1, -1};
        for (int u = 0; u < classes; ++u) {
            for (int v = u + 1; v < classes; ++v) {
                std::vector<int> merged = cell_class;
                for (int& c : merged)
                    if (c == v) c = u;
                std::vector<int> compact = normalize_classes(merged);
                ClusterFit f = fit_from_classes(J, compact, classes - 1, eps,
                                                ClusterMethod::Generic);
                if (f.l1_error < best_err) {
                    best_err = f.l1_error;
                    best_pair = {u, v};
                }
            }
        }
        const bool forced = max_steps > 0 && classes > max_steps;
        if (!forced && best_err > budget) break;
        for (int& c : cell_class)
            if (c == best_pair.second) c = best_pair.first;
        cell_class = normalize_classes(cell_class);
        --classes;
        best = fit_from_classes(J, cell_class, classes, eps, ClusterMethod::Generic);
        if (max_steps > 0 && classes <= max_steps && best.l1_error <= budget) break;
    }
    return best;
}

double cluster_certificate(const StepKernel& J, const ClusterFit& fit,
                           const std::vector<int>& cell_class) {
    if (cell_class.size() != static_cast<std::size_t>(J.steps()))
        throw DimensionError("cluster_certificate: one class per kernel cell required");
    const int r = J.r();
    std::vector<int> t(r, 0);
    std::vector<int> cls(r, 0);
    std::size_t flat = 0;
    double err = 0;
    do {
        double w = 1;
        for (int j = 0; j < r; ++j) {
            w *= J.masses()[t[j]];
            cls[j] = cell_class[t[j]];
        }
        err += w * std::fabs(J.values()[flat] - fit.approx.value_at(cls));
        ++flat;
    } while (next_tuple(t, J.steps()));
    return err;
}

InteractionArray MicroGseInstance::interaction() const {
    return InteractionArray::real(supernode_cost.k(), supernode_cost.r(),
                                  supernode_cost.values());
}

MicroGseInstance qap_to_micro(const ClusterFit& fit) {
    const int q = fit.approx.steps();
    RArray cost(fit.approx.r(), q, fit.approx.values());
    return MicroGseInstance{std::move(cost), StateDistribution(q, fit.approx.masses())};
}

QapTrials estimate_qap(const StepKernel& W, const ClusterFit& fit, int k, int trials,
                       std::uint64_t seed) {
    const int q = fit.approx.steps();
    MicroGseInstance inst = qap_to_micro(fit);
    LayeredInteraction J{inst.interaction()};
    QapTrials out;
    out.estimates.reserve(trials);
    const std::uint64_t point_tag = rng::tag("qap-cost-sample-point");
    for (int t = 0; t < trials; ++t) {
        const std::uint64_t seed_w = rng::derive(seed, "qap-structure-sample", t);
        const std::uint64_t seed_j = rng::derive(seed, "qap-cost-sample", t);
        SampledGraph GW = sample_g(W, k, seed_w);
        std::vector<double> counts(q, 0.0);
        for (int j = 0; j < k; ++j) {
            const double u = rng::indexed_uniform(seed_j, point_tag, j);
            counts[fit.approx.cell_of(u)] += 1.0;
        }
        for (double& c : counts) c /= k;
        StateDistribution b(q, counts);
        GseResult res = gse_integer_exact(LayeredRArray::single(GW.array), J, b);
        out.estimates.push_back(res.value);
    }
    return out;
}

} // namespace gselab
