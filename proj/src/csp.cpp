#include "gselab/csp.hpp"

#include <algorithm>
#include <cmath>

#include "gselab/rng.hpp"

namespace gselab {

Formula::Formula(int n, int r, int q, int d, std::vector<Constraint> constraints, bool weighted)
    : n_(n), r_(r), q_(q), d_(d), weighted_(weighted), constraints_(std::move(constraints)) {
    if (n < 1 || r < 1 || q < 1) throw ArgumentError("Formula: n, r, q must be >= 1");
    if (d < 1) throw ArgumentError("Formula: the evaluation bound d must be >= 1");
    const std::size_t table_size = checked_pow(static_cast<std::size_t>(q), r, std::size_t(1) << 31);
    for (const Constraint& c : constraints_) {
        if (c.table.size() != table_size)
            throw DimensionError("Formula: constraint table must have q^r entries");
        if (c.edge.size() != static_cast<std::size_t>(r))
            throw DimensionError("Formula: constraint edge must have r variables");
        for (int v : c.edge)
            if (v < 0 || v >= n) throw DomainError("Formula: edge variable out of range");
        for (double t : c.table) {
            if (weighted_) {
                if (std::fabs(t) > d + 1e-12)
                    throw DomainError("Formula: weighted table entry exceeds d");
            } else if (t != 0.0 && t != 1.0) {
                throw DomainError("Formula: boolean table entries must be 0 or 1");
            }
        }
    }
}

double Formula::eval_table(const Constraint& c, const std::vector<int>& states) const {
    std::size_t idx = 0;
    for (int j = 0; j < r_; ++j) idx = idx * q_ + static_cast<std::size_t>(states[c.edge[j]]);
    return c.table[idx];
}

LayeredRArray eval_rep(const Formula& F) {
    const int n = F.n(), r = F.r(), q = F.q();
    const std::size_t layers = checked_pow(static_cast<std::size_t>(q), r, std::size_t(1) << 31);
    const std::size_t cells = checked_pow(static_cast<std::size_t>(n), r, std::size_t(1) << 31);
    std::vector<std::vector<double>> vals(layers, std::vector<double>(cells, 0.0));
    for (const Constraint& c : F.constraints()) {
        std::size_t edge_flat = 0;
        for (int j = 0; j < r; ++j) edge_flat = edge_flat * n + static_cast<std::size_t>(c.edge[j]);
        for (std::size_t z = 0; z < layers; ++z) vals[z][edge_flat] += c.table[z];
    }
    std::vector<RArray> out;
    std::vector<std::string> names;
    out.reserve(layers);
    std::vector<int> z(r, 0);
    for (std::size_t layer = 0; layer < layers; ++layer) {
        for (double v : vals[layer])
            if (std::fabs(v) > F.d() + 1e-12)
                throw DomainError("eval_rep: an edge evaluates above the bound d");
        out.emplace_back(r, n, std::move(vals[layer]));
        std::string name = "z";
        for (int j = 0; j < r; ++j) name += (j ? "," : "=") + std::to_string(z[j]);
        names.push_back(name);
        next_tuple(z, q);
    }
    return LayeredRArray(std::move(out), std::move(names));
}

double max_csp_exact(const Formula& F) {
    const int n = F.n(), q = F.q();
    if (checked_pow(static_cast<std::size_t>(q), n, 20'000'000) > 20'000'000)
        throw CapacityError("max_csp_exact: q^n exceeds the 2e7 enumeration guard");
    std::vector<int> sigma(n, 0);
    double best = 0; // the empty assignment count can never be negative for boolean tables
    bool first = true;
    do {
        double satisfied = 0;
        for (const Constraint& c : F.constraints()) satisfied += F.eval_table(c, sigma);
        if (first || satisfied > best) {
            best = satisfied;
            first = false;
        }
    } while (next_tuple(sigma, q));
    const double cells =
        static_cast<double>(checked_pow(static_cast<std::size_t>(n), F.r(), std::size_t(1) << 62));
    return best / cells;
}

Formula sample_formula(const Formula& F, int k, std::uint64_t seed) {
    if (k > F.n()) throw ArgumentError("sample_formula: sample larger than the variable set");
    std::vector<int> chosen = rng::sample_indices(seed, F.n(), k);
    std::sort(chosen.begin(), chosen.end());
    std::vector<int> relabel(F.n(), -1);
    for (int i = 0; i < k; ++i) relabel[chosen[i]] = i;
    std::vector<Constraint> kept;
    for (const Constraint& c : F.constraints()) {
        bool inside = true;
        for (int v : c.edge) inside = inside && relabel[v] >= 0;
        if (!inside) continue;
        Constraint cc = c;
        for (int& v : cc.edge) v = relabel[v];
        kept.push_back(std::move(cc));
    }
    return Formula(k, F.r(), F.q(), F.d(), std::move(kept), F.weighted());
}

double tilde_density(const Formula& H, const Formula& G) {
    if (H.q() != G.q() || H.r() != G.r())
        throw DimensionError("tilde_density: formulas must share K and r");
    if (H.d() != G.d())
        throw DimensionError("tilde_density: formulas must share the bound d");
    const int kh = H.n(), ng = G.n(), r = H.r(), q = H.q();
    const std::size_t maps = checked_pow(static_cast<std::size_t>(ng), kh, std::size_t(1) << 31);
    if (maps > (std::size_t(1) << 26))
        throw CapacityError("tilde_density: too many maps to enumerate");

    LayeredRArray eh = eval_rep(H);
    LayeredRArray eg = eval_rep(G);
    const std::size_t layers = eh.layer_count();

    // decorated edges of H: those carrying at least one constraint
    struct DecoratedEdge {
        std::vector<int> edge;
        std::vector<double> exponents; // per layer z
    };
    std::vector<DecoratedEdge> edges;
    {
        std::vector<int> e(r, 0);
        std::size_t flat = 0;
        do {
            std::vector<double> expo(layers);
            bool any = false;
            for (std::size_t z = 0; z < layers; ++z) {
                expo[z] = eh.layer(z).at(flat);
                any = any || expo[z] != 0.0;
            }
            if (any) edges.push_back({e, std::move(expo)});
            ++flat;
        } while (next_tuple(e, kh));
    }

    std::vector<int> phi(kh, 0);
    std::vector<int> image(r, 0);
    double total = 0;
    bool more = true;
    while (more) {
        double prod = 1;
        for (const DecoratedEdge& de : edges) {
            for (int j = 0; j < r; ++j) image[j] = phi[de.edge[j]];
            std::size_t flat = 0;
            for (int j = 0; j < r; ++j) flat = flat * ng + image[j];
            for (std::size_t z = 0; z < layers && prod != 0.0; ++z) {
                const double expo = de.exponents[z];
                if (expo == 0.0) continue; // 0^0 = 1 by convention
                const double base = eg.layer(z).at(flat);
                prod *= std::pow(base, expo);
            }
            if (prod == 0.0) break;
        }
        total += prod;
        more = false;
        for (int j = kh - 1; j >= 0; --j) {
            if (++phi[j] < ng) {
                more = true;
                break;
            }
            phi[j] = 0;
        }
    }
    (void)q;
    return total / static_cast<double>(maps);
}

std::vector<double> estimate_max_csp(const Formula& F, int k, int trials, std::uint64_t seed) {
    std::vector<double> out;
    out.reserve(trials);
    for (int t = 0; t < trials; ++t) {
        Formula sub = sample_formula(F, k, rng::derive(seed, "max-csp-trial", t));
        out.push_back(max_csp_exact(sub));
    }
    return out;
}

} // namespace gselab
