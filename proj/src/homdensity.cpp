#include "gselab/homdensity.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "gselab/rng.hpp"

namespace gselab {

double Decoration::apply(double host_value) const {
    if (mode == Mode::Table) {
        const double rounded = std::nearbyint(host_value);
        if (std::fabs(host_value - rounded) > 1e-9 || rounded < 0 ||
            rounded >= static_cast<double>(data.size()))
            throw DomainError("Decoration: host color " + std::to_string(host_value) +
                              " is not in the table");
        return data[static_cast<std::size_t>(rounded)];
    }
    double acc = 0;
    for (std::size_t i = data.size(); i-- > 0;) acc = acc * host_value + data[i];
    return acc;
}

double Decoration::sup_norm() const {
    double m = 0;
    for (double v : data) m = std::max(m, std::fabs(v));
    return m;
}

DecoratedTemplate::DecoratedTemplate(int k, int r) : k_(k), r_(r) {
    if (k < 1 || r < 1) throw ArgumentError("DecoratedTemplate: k and r must be >= 1");
}

void DecoratedTemplate::decorate(std::vector<int> edge, Decoration d) {
    if (edge.size() != static_cast<std::size_t>(r_))
        throw DimensionError("DecoratedTemplate: edge must have r vertices");
    for (int v : edge)
        if (v < 0 || v >= k_) throw DomainError("DecoratedTemplate: edge vertex out of range");
    if (d.mode == Decoration::Mode::Table && d.sup_norm() > 1 + 1e-12)
        throw DomainError("DecoratedTemplate: table decorations must have sup norm <= 1");
    edges_[std::move(edge)] = std::move(d);
}

double DecoratedTemplate::inf_norm() const {
    double m = 0;
    for (const auto& [edge, d] : edges_) m = std::max(m, d.sup_norm());
    return m;
}

namespace {

double map_product(const DecoratedTemplate& F, const RArray& G, const std::vector<int>& phi) {
    double prod = 1;
    std::vector<int> image(F.r());
    for (const auto& [edge, d] : F.edges()) {
        for (int j = 0; j < F.r(); ++j) image[j] = phi[edge[j]];
        prod *= d.apply(G.at(image));
        if (prod == 0.0) return 0.0;
    }
    return prod;
}

double falling_factorial(int n, int k) {
    double f = 1;
    for (int i = 0; i < k; ++i) f *= n - i;
    return f;
}

// set partitions of [k] as restricted growth strings
std::vector<std::vector<int>> set_partitions(int k) {
    std::vector<std::vector<int>> out;
    std::vector<int> rgs(k, 0);
    while (true) {
        out.push_back(rgs);
        int j = k - 1;
        for (; j > 0; --j) {
            int cap = 0;
            for (int i = 0; i < j; ++i) cap = std::max(cap, rgs[i]);
            if (rgs[j] <= cap) {
                ++rgs[j];
                for (int i = j + 1; i < k; ++i) rgs[i] = 0;
                break;
            }
            rgs[j] = 0;
        }
        if (j == 0) break;
    }
    return out;
}

DecoratedTemplate quotient(const DecoratedTemplate& F, const std::vector<int>& blocks,
                           int block_count) {
    DecoratedTemplate Q(block_count, F.r());
    std::map<std::vector<int>, Decoration> merged;
    for (const auto& [edge, d] : F.edges()) {
        std::vector<int> image(F.r());
        for (int j = 0; j < F.r(); ++j) image[j] = blocks[edge[j]];
        auto it = merged.find(image);
        if (it == merged.end()) {
            merged.emplace(std::move(image), d);
        } else {
            Decoration& acc = it->second;
            if (acc.mode != d.mode)
                throw ArgumentError("quotient: cannot multiply mixed decoration modes");
            if (acc.mode == Decoration::Mode::Table) {
                if (acc.data.size() != d.data.size())
                    throw DimensionError("quotient: mismatched color palettes");
                for (std::size_t i = 0; i < acc.data.size(); ++i) acc.data[i] *= d.data[i];
            } else {
                // polynomial product by coefficient convolution
                std::vector<double> conv(acc.data.size() + d.data.size() - 1, 0.0);
                for (std::size_t i = 0; i < acc.data.size(); ++i)
                    for (std::size_t j = 0; j < d.data.size(); ++j)
                        conv[i + j] += acc.data[i] * d.data[j];
                acc.data = std::move(conv);
            }
        }
    }
    for (auto& [edge, d] : merged) {
        // products of sup-norm <= 1 tables stay within 1; install directly
        std::vector<int> e = edge;
        Q.decorate(std::move(e), d);
    }
    return Q;
}

} // namespace

double hom_sum(const DecoratedTemplate& F, const RArray& G) {
    const int k = F.k(), n = G.k();
    const std::size_t maps = checked_pow(static_cast<std::size_t>(n), k, std::size_t(1) << 31);
    if (maps > (std::size_t(1) << 26))
        throw CapacityError("hom_sum: too many maps to enumerate");
    std::vector<int> phi(k, 0);
    double total = 0;
    do {
        total += map_product(F, G, phi);
    } while (next_tuple(phi, n));
    return total;
}

double t_hom(const DecoratedTemplate& F, const RArray& G) {
    const double maps =
        static_cast<double>(checked_pow(static_cast<std::size_t>(G.k()), F.k(), std::size_t(1) << 62));
    return hom_sum(F, G) / maps;
}

double inj_sum(const DecoratedTemplate& F, const RArray& G) {
    const int k = F.k(), n = G.k();
    if (k > n) throw ArgumentError("inj_sum: template larger than the host");
    std::vector<int> phi(k, 0);
    std::vector<bool> used(n, false);
    double total = 0;
    std::function<void(int)> rec = [&](int depth) {
        if (depth == k) {
            total += map_product(F, G, phi);
            return;
        }
        for (int v = 0; v < n; ++v) {
            if (used[v]) continue;
            used[v] = true;
            phi[depth] = v;
            rec(depth + 1);
            used[v] = false;
        }
    };
    rec(0);
    return total;
}

double t_inj(const DecoratedTemplate& F, const RArray& G) {
    return inj_sum(F, G) / falling_factorial(G.k(), F.k());
}

double inj_via_partitions(const DecoratedTemplate& F, const RArray& G) {
    if (F.k() > 4) throw CapacityError("inj_via_partitions: |V(F)| <= 4 required");
    double total = 0;
    for (const std::vector<int>& rgs : set_partitions(F.k())) {
        const int blocks = *std::max_element(rgs.begin(), rgs.end()) + 1;
        std::vector<int> sizes(blocks, 0);
        for (int b : rgs) ++sizes[b];
        double weight = ((F.k() - blocks) % 2 == 0) ? 1.0 : -1.0;
        for (int s : sizes) weight *= falling_factorial(s - 1, s - 1); // (|S|-1)!
        total += weight * hom_sum(quotient(F, rgs, blocks), G);
    }
    return total;
}

double inj_forward_sum(const DecoratedTemplate& F, const RArray& G) {
    if (F.k() > 4) throw CapacityError("inj_forward_sum: |V(F)| <= 4 required");
    double total = 0;
    for (const std::vector<int>& rgs : set_partitions(F.k())) {
        const int blocks = *std::max_element(rgs.begin(), rgs.end()) + 1;
        total += inj_sum(quotient(F, rgs, blocks), G);
    }
    return total;
}

double t_hom_kernel(const DecoratedTemplate& F, const StepKernel& W) {
    const int k = F.k(), m = W.steps();
    const std::size_t maps = checked_pow(static_cast<std::size_t>(m), k, std::size_t(1) << 31);
    if (maps > (std::size_t(1) << 26))
        throw CapacityError("t_hom_kernel: too many cell maps to enumerate");
    std::vector<int> phi(k, 0);
    std::vector<int> image(F.r());
    double total = 0;
    do {
        double prod = 1;
        for (int v = 0; v < k; ++v) prod *= W.masses()[phi[v]];
        for (const auto& [edge, d] : F.edges()) {
            for (int j = 0; j < F.r(); ++j) image[j] = phi[edge[j]];
            prod *= d.apply(W.value_at(image));
            if (prod == 0.0) break;
        }
        total += prod;
    } while (next_tuple(phi, m));
    return total;
}

DensityTrials density_estimate(const DecoratedTemplate& F, const RArray& G, int k,
                               int trials, std::uint64_t seed) {
    if (k < F.k()) throw ArgumentError("density_estimate: sample smaller than the template");
    DensityTrials out;
    out.reference = t_hom(F, G);
    out.estimates.reserve(trials);
    for (int t = 0; t < trials; ++t) {
        SampledGraph s = sample_without_replacement(G, k, rng::derive(seed, "density-trial", t));
        out.estimates.push_back(t_hom(F, s.array));
    }
    return out;
}

DensityTrials density_estimate(const DecoratedTemplate& F, const StepKernel& W, int k,
                               int trials, std::uint64_t seed) {
    if (k < F.k()) throw ArgumentError("density_estimate: sample smaller than the template");
    DensityTrials out;
    out.reference = t_hom_kernel(F, W);
    out.estimates.reserve(trials);
    for (int t = 0; t < trials; ++t) {
        SampledGraph s = sample_g(W, k, rng::derive(seed, "density-trial", t));
        out.estimates.push_back(t_hom(F, s.array));
    }
    return out;
}

} // namespace gselab
