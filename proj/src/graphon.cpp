#include "gselab/graphon.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "gselab/rng.hpp"

namespace gselab {

namespace {
constexpr std::uint64_t kVertexUniformTag = rng::tag("vertex-subset-uniform");
}

StepKernel::StepKernel(int r, std::vector<double> masses, std::vector<double> values)
    : r_(r), masses_(std::move(masses)), values_(std::move(values)) {
    if (r < 1) throw ArgumentError("StepKernel: arity must be >= 1");
    if (masses_.empty()) throw ArgumentError("StepKernel: needs at least one step");
    double s = 0;
    for (double m : masses_) {
        if (m <= 0) throw DomainError("StepKernel: step masses must be positive");
        s += m;
    }
    if (std::fabs(s - 1.0) > 1e-12)
        throw DomainError("StepKernel: masses sum to " + std::to_string(s));
    std::size_t need =
        checked_pow(masses_.size(), r, std::size_t(1) << 31);
    if (values_.size() != need)
        throw DimensionError("StepKernel: expected m^r values");
    for (double v : values_)
        if (!std::isfinite(v)) throw DomainError("StepKernel: values must be finite");
    cumulative_.resize(masses_.size());
    double acc = 0;
    for (std::size_t i = 0; i < masses_.size(); ++i) {
        acc += masses_[i];
        cumulative_[i] = acc;
    }
    cumulative_.back() = 1.0;
}

double StepKernel::value_at(const std::vector<int>& cells) const {
    std::size_t idx = 0;
    for (int c : cells) idx = idx * masses_.size() + static_cast<std::size_t>(c);
    return values_[idx];
}

int StepKernel::cell_of(double u) const {
    auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    if (it == cumulative_.end()) --it;
    return static_cast<int>(it - cumulative_.begin());
}

double StepKernel::cell_mass(const std::vector<int>& cells) const {
    double m = 1;
    for (int c : cells) m *= masses_[c];
    return m;
}

double StepKernel::inf_norm() const {
    double m = 0;
    for (double v : values_) m = std::max(m, std::fabs(v));
    return m;
}

double StepKernel::l2_norm() const {
    const int m = steps();
    std::vector<int> c(r_, 0);
    double s = 0;
    std::size_t flat = 0;
    do {
        double mass = 1;
        for (int j = 0; j < r_; ++j) mass *= masses_[c[j]];
        s += values_[flat] * values_[flat] * mass;
        ++flat;
    } while (next_tuple(c, m));
    return std::sqrt(s);
}

double StepKernel::l1_norm() const {
    const int m = steps();
    std::vector<int> c(r_, 0);
    double s = 0;
    std::size_t flat = 0;
    do {
        double mass = 1;
        for (int j = 0; j < r_; ++j) mass *= masses_[c[j]];
        s += std::fabs(values_[flat]) * mass;
        ++flat;
    } while (next_tuple(c, m));
    return s;
}

FullStepGraphon::FullStepGraphon(int r, std::vector<int> granularity,
                                 std::vector<double> values, int color_count)
    : r_(r), granularity_(std::move(granularity)), values_(std::move(values)),
      color_count_(color_count) {
    if (r < 1 || r > 16) throw ArgumentError("FullStepGraphon: arity out of range");
    const std::size_t masks = std::size_t(1) << r;
    if (granularity_.size() != masks)
        throw DimensionError("FullStepGraphon: expected one granularity per subset of [r]");
    std::size_t cells = 1;
    for (std::size_t mask = 0; mask < masks; ++mask) {
        int g = granularity_[mask];
        if (mask == 0) {
            if (g < 0) throw ArgumentError("FullStepGraphon: bad empty-set granularity");
            if (g > 0) cells *= static_cast<std::size_t>(g);
        } else {
            if (g < 1)
                throw ArgumentError("FullStepGraphon: every nonempty subset needs a grid");
            cells *= static_cast<std::size_t>(g);
        }
    }
    if (values_.size() != cells)
        throw DimensionError("FullStepGraphon: value table size must match the grid");
    if (color_count_ < 0) throw ArgumentError("FullStepGraphon: bad color count");
    if (color_count_ > 0)
        for (double v : values_)
            if (v < 0 || v >= color_count_ || std::nearbyint(v) != v)
                throw DomainError("FullStepGraphon: color id outside the palette");
}

double FullStepGraphon::value_at(const std::vector<int>& cells) const {
    std::size_t idx = 0;
    const std::size_t masks = granularity_.size();
    for (std::size_t mask = 0; mask < masks; ++mask) {
        if (granularity_[mask] == 0) continue;
        idx = idx * static_cast<std::size_t>(granularity_[mask]) +
              static_cast<std::size_t>(cells[mask]);
    }
    return values_[idx];
}

double FullStepGraphon::inf_norm() const {
    double m = 0;
    for (double v : values_) m = std::max(m, std::fabs(v));
    return m;
}

namespace {

std::vector<double> singleton_uniforms(std::uint64_t seed, int k) {
    std::vector<double> u(k);
    int v[1];
    for (int i = 0; i < k; ++i) {
        v[0] = i;
        u[i] = rng::subset_uniform(seed, kVertexUniformTag, std::span<const int>(v, 1));
    }
    return u;
}

// sorted distinct vertex subset for coordinate mask `mask` of edge `e`
std::vector<int> vertex_subset(const std::vector<int>& e, unsigned mask) {
    std::vector<int> sub;
    for (std::size_t j = 0; j < e.size(); ++j)
        if (mask & (1u << j)) sub.push_back(e[j]);
    std::sort(sub.begin(), sub.end());
    sub.erase(std::unique(sub.begin(), sub.end()), sub.end());
    return sub;
}

int cell_on_grid(double u, int g) {
    int c = static_cast<int>(u * g);
    return c >= g ? g - 1 : c;
}

} // namespace

SampledGraph sample_g(const StepKernel& W, int k, std::uint64_t seed) {
    if (k < W.r()) throw ArgumentError("sample_g: need k >= r vertices");
    std::vector<double> u = singleton_uniforms(seed, k);
    std::vector<int> cell(k);
    for (int i = 0; i < k; ++i) cell[i] = W.cell_of(u[i]);
    const int r = W.r();
    std::vector<int> e(r, 0);
    std::vector<int> c(r, 0);
    std::vector<double> vals(checked_pow(static_cast<std::size_t>(k), r, std::size_t(1) << 31));
    std::size_t flat = 0;
    do {
        for (int j = 0; j < r; ++j) c[j] = cell[e[j]];
        vals[flat++] = W.value_at(c);
    } while (next_tuple(e, k));
    return SampledGraph{RArray(r, k, std::move(vals)), std::move(u), seed};
}

SampledGraph sample_g(const FullStepGraphon& W, int k, std::uint64_t seed) {
    if (k < W.r()) throw ArgumentError("sample_g: need k >= r vertices");
    std::vector<double> su = singleton_uniforms(seed, k);
    const int r = W.r();
    const std::size_t masks = std::size_t(1) << r;
    const double u_empty =
        W.has_empty_coordinate()
            ? rng::subset_uniform(seed, kVertexUniformTag, std::span<const int>())
            : 0.0;
    std::vector<int> e(r, 0);
    std::vector<int> cells(masks, 0);
    std::vector<double> vals(checked_pow(static_cast<std::size_t>(k), r, std::size_t(1) << 31));
    std::size_t flat = 0;
    do {
        if (W.has_empty_coordinate())
            cells[0] = cell_on_grid(u_empty, W.granularity()[0]);
        for (std::size_t mask = 1; mask < masks; ++mask) {
            std::vector<int> sub = vertex_subset(e, static_cast<unsigned>(mask));
            double u = sub.size() == 1
                           ? su[sub[0]]
                           : rng::subset_uniform(seed, kVertexUniformTag, sub);
            cells[mask] = cell_on_grid(u, W.granularity()[mask]);
        }
        vals[flat++] = W.value_at(cells);
    } while (next_tuple(e, k));
    return SampledGraph{RArray(r, k, std::move(vals)), std::move(su), seed};
}

SampledGraph sample_h(const StepKernel& W, int k, std::uint64_t seed) {
    // naive kernels have no higher coordinates: H(k,W) == G(k,W)
    return sample_g(W, k, seed);
}

SampledGraph sample_h(const FullStepGraphon& W, int k, std::uint64_t seed) {
    if (k < W.r()) throw ArgumentError("sample_h: need k >= r vertices");
    if (!W.real_valued())
        throw ArgumentError("sample_h: averaging needs a real-valued graphon");
    std::vector<double> su = singleton_uniforms(seed, k);
    const int r = W.r();
    const std::size_t masks = std::size_t(1) << r;

    // averaged masks: the empty set and every subset of [r] of size >= 2
    std::vector<std::size_t> averaged;
    for (std::size_t mask = 0; mask < masks; ++mask) {
        if (mask == 0 && !W.has_empty_coordinate()) continue;
        if (mask != 0 && __builtin_popcountll(mask) < 2) continue;
        averaged.push_back(mask);
    }

    std::vector<int> e(r, 0);
    std::vector<int> cells(masks, 0);
    std::vector<double> vals(checked_pow(static_cast<std::size_t>(k), r, std::size_t(1) << 31));
    std::size_t flat = 0;
    do {
        for (int j = 0; j < r; ++j)
            cells[std::size_t(1) << j] = cell_on_grid(su[e[j]], W.granularity()[std::size_t(1) << j]);
        // mean over the grid cells of all averaged coordinates
        double total = 0;
        double weight = 1;
        std::vector<int> idx(averaged.size(), 0);
        for (std::size_t m : averaged) weight *= 1.0 / W.granularity()[m];
        bool more = true;
        while (more) {
            for (std::size_t t = 0; t < averaged.size(); ++t) cells[averaged[t]] = idx[t];
            total += W.value_at(cells);
            more = false;
            for (int t = static_cast<int>(averaged.size()) - 1; t >= 0; --t) {
                if (++idx[t] < W.granularity()[averaged[t]]) {
                    more = true;
                    break;
                }
                idx[t] = 0;
            }
            if (averaged.empty()) break;
        }
        vals[flat++] = total * weight;
    } while (next_tuple(e, k));
    return SampledGraph{RArray(r, k, std::move(vals)), std::move(su), seed};
}

std::pair<SampledGraph, SampledGraph> coupled_samples(const StepKernel& W, int k,
                                                      std::uint64_t seed) {
    return {sample_g(W, k, seed), sample_h(W, k, seed)};
}

std::pair<SampledGraph, SampledGraph> coupled_samples(const FullStepGraphon& W, int k,
                                                      std::uint64_t seed) {
    return {sample_g(W, k, seed), sample_h(W, k, seed)};
}

RArray samp_exchangeable(const FullStepGraphon& f, int n, std::uint64_t seed) {
    if (!f.has_empty_coordinate())
        throw ArgumentError("samp_exchangeable: graphon lacks the empty-set coordinate");
    if (n < 1) throw ArgumentError("samp_exchangeable: need n >= 1");
    std::vector<double> su = singleton_uniforms(seed, n);
    const int r = f.r();
    const std::size_t masks = std::size_t(1) << r;
    const double u_empty =
        rng::subset_uniform(seed, kVertexUniformTag, std::span<const int>());
    std::vector<int> e(r, 0);
    std::vector<int> cells(masks, 0);
    std::vector<double> vals(checked_pow(static_cast<std::size_t>(n), r, std::size_t(1) << 31));
    std::size_t flat = 0;
    do {
        cells[0] = cell_on_grid(u_empty, f.granularity()[0]);
        for (std::size_t mask = 1; mask < masks; ++mask) {
            std::vector<int> sub = vertex_subset(e, static_cast<unsigned>(mask));
            double u = sub.size() == 1 ? su[sub[0]]
                                       : rng::subset_uniform(seed, kVertexUniformTag, sub);
            cells[mask] = cell_on_grid(u, f.granularity()[mask]);
        }
        vals[flat++] = f.value_at(cells);
    } while (next_tuple(e, n));
    return RArray(r, n, std::move(vals));
}

StepKernel graphon_of_graph(const RArray& G) {
    RArray z = zero_diagonal(G);
    std::vector<double> masses(G.k(), 1.0 / G.k());
    return StepKernel(G.r(), std::move(masses), z.values());
}

StepKernel stepkernel_of_array(const RArray& A) {
    std::vector<double> masses(A.k(), 1.0 / A.k());
    return StepKernel(A.r(), std::move(masses), A.values());
}

SampledGraph sample_without_replacement(const RArray& G, int k, std::uint64_t seed) {
    if (k > G.k())
        throw ArgumentError("sample_without_replacement: sample larger than the graph");
    std::vector<int> verts = rng::sample_indices(seed, G.k(), k);
    std::sort(verts.begin(), verts.end());
    const int r = G.r();
    std::vector<int> e(r, 0);
    std::vector<int> orig(r, 0);
    std::vector<double> vals(checked_pow(static_cast<std::size_t>(k), r, std::size_t(1) << 31));
    std::size_t flat = 0;
    do {
        for (int j = 0; j < r; ++j) orig[j] = verts[e[j]];
        vals[flat++] = G.at(orig);
    } while (next_tuple(e, k));
    return SampledGraph{RArray(r, k, std::move(vals)), {}, seed};
}

} // namespace gselab
