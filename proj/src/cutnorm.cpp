#include "gselab/cutnorm.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "gselab/rng.hpp"

namespace gselab {

namespace {

// Shared cell view: n cells per axis with masses (uniform 1 for raw arrays)
// and weighted values B_c = value_c * prod_j mass_{c_j}.
struct CellView {
    int r = 0;
    int n = 0;
    std::vector<double> masses;   // per cell, already folded into weighted
    std::vector<double> weighted; // B
};

CellView view_of(const RArray& A) {
    CellView v;
    v.r = A.r();
    v.n = A.k();
    v.masses.assign(A.k(), 1.0);
    v.weighted = A.values();
    return v;
}

CellView view_of(const StepKernel& W) {
    CellView v;
    v.r = W.r();
    v.n = W.steps();
    v.masses = W.masses();
    v.weighted = W.values();
    std::vector<int> c(W.r(), 0);
    std::size_t flat = 0;
    do {
        double mass = 1;
        for (int j = 0; j < W.r(); ++j) mass *= v.masses[c[j]];
        v.weighted[flat] *= mass;
        ++flat;
    } while (next_tuple(c, W.steps()));
    return v;
}

std::vector<int> mask_to_subset(std::uint64_t mask, int n) {
    std::vector<int> out;
    for (int i = 0; i < n; ++i)
        if (mask & (std::uint64_t(1) << i)) out.push_back(i);
    return out;
}

struct ExactSearch {
    const CellView& view;
    double best = -1;
    std::vector<std::uint64_t> best_masks; // axis 1 .. axis r
    std::vector<std::uint64_t> masks;      // masks[axis-1], axes 2..r live here

    explicit ExactSearch(const CellView& v) : view(v), best_masks(v.r, 0), masks(v.r, 0) {}

    void offer(double value, std::uint64_t first_axis_mask) {
        masks[0] = first_axis_mask;
        if (value > best) {
            best = value;
            best_masks = masks;
        } else if (value == best && masks < best_masks) {
            best_masks = masks;
        }
    }

    // cur holds the input contracted over the already-chosen subsets of the
    // trailing axes; shape n^axis, last index fastest.
    void run(int axis, const std::vector<double>& cur) {
        const int n = view.n;
        if (axis == 1) {
            double pos = 0, neg = 0;
            std::uint64_t pos_mask = 0, neg_mask = 0;
            for (int i = 0; i < n; ++i) {
                if (cur[i] > 0) {
                    pos += cur[i];
                    pos_mask |= std::uint64_t(1) << i;
                } else if (cur[i] < 0) {
                    neg += cur[i];
                    neg_mask |= std::uint64_t(1) << i;
                }
            }
            offer(pos, pos_mask);
            offer(-neg, neg_mask);
            return;
        }
        const std::size_t stride = cur.size() / n;
        std::vector<double> acc(stride, 0.0);
        std::uint64_t mask = 0;
        masks[axis - 1] = 0;
        run(axis - 1, acc); // empty subset
        const std::uint64_t total = std::uint64_t(1) << n;
        for (std::uint64_t g = 1; g < total; ++g) {
            const int bit = std::countr_zero(g);
            const bool add = !(mask & (std::uint64_t(1) << bit));
            const double sgn = add ? 1.0 : -1.0;
            mask ^= std::uint64_t(1) << bit;
            // element `bit` of this axis toggles: adjust the contraction
            for (std::size_t p = 0; p < stride; ++p) acc[p] += sgn * cur[p * n + bit];
            masks[axis - 1] = mask;
            run(axis - 1, acc);
        }
        masks[axis - 1] = 0;
    }
};

CutWitness exact_on_view(const CellView& v) {
    if (static_cast<std::size_t>(v.r - 1) * v.n > 24)
        throw CapacityError("cut_norm_exact: (r-1)*n = " +
                            std::to_string((v.r - 1) * v.n) +
                            " exceeds the enumeration guard 24");
    ExactSearch search(v);
    search.run(v.r, v.weighted);
    CutWitness w;
    w.value = std::max(search.best, 0.0);
    for (int j = 0; j < v.r; ++j) w.subsets.push_back(mask_to_subset(search.best_masks[j], v.n));
    return w;
}

double box_sum(const CellView& v, const std::vector<std::uint64_t>& masks) {
    std::vector<int> c(v.r, 0);
    std::size_t flat = 0;
    double s = 0;
    do {
        bool inside = true;
        for (int j = 0; j < v.r && inside; ++j)
            inside = (masks[j] >> c[j]) & 1;
        if (inside) s += v.weighted[flat];
        ++flat;
    } while (next_tuple(c, v.n));
    return s;
}

// marginal of the box sum along `axis` with the other subsets fixed
std::vector<double> axis_marginal(const CellView& v, const std::vector<std::uint64_t>& masks,
                                  int axis) {
    std::vector<double> m(v.n, 0.0);
    std::vector<int> c(v.r, 0);
    std::size_t flat = 0;
    do {
        bool inside = true;
        for (int j = 0; j < v.r && inside; ++j)
            inside = (j == axis) || ((masks[j] >> c[j]) & 1);
        if (inside) m[c[axis]] += v.weighted[flat];
        ++flat;
    } while (next_tuple(c, v.n));
    return m;
}

CutWitness heuristic_on_view(const CellView& v, int restarts, std::uint64_t seed) {
    if (v.n > 64) throw CapacityError("cut_norm_heuristic: more than 64 cells per axis");
    const std::uint64_t full =
        v.n == 64 ? ~std::uint64_t(0) : ((std::uint64_t(1) << v.n) - 1);
    double best = 0;
    std::vector<std::uint64_t> best_masks(v.r, 0);

    auto ascend = [&](std::vector<std::uint64_t> masks, bool maximize) {
        for (int round = 0; round < 100; ++round) {
            bool changed = false;
            for (int axis = 0; axis < v.r; ++axis) {
                std::vector<double> m = axis_marginal(v, masks, axis);
                std::uint64_t chosen = 0;
                for (int i = 0; i < v.n; ++i) {
                    const bool take = maximize ? m[i] > 0 : m[i] < 0;
                    if (take) chosen |= std::uint64_t(1) << i;
                }
                if (chosen != masks[axis]) {
                    masks[axis] = chosen;
                    changed = true;
                }
            }
            if (!changed) break;
        }
        const double value = std::fabs(box_sum(v, masks));
        if (value > best) {
            best = value;
            best_masks = masks;
        }
    };

    rng::Stream stream(seed, "cutnorm-heuristic");
    const int total = std::max(restarts, 1);
    for (int restart = 0; restart < total; ++restart) {
        std::vector<std::uint64_t> masks(v.r, full);
        if (restart > 0)
            for (int j = 0; j < v.r; ++j) {
                std::uint64_t m = 0;
                for (int i = 0; i < v.n; ++i)
                    if (stream.next_unit() < 0.5) m |= std::uint64_t(1) << i;
                masks[j] = m;
            }
        ascend(masks, true);
        ascend(masks, false);
    }
    CutWitness w;
    w.value = best;
    for (int j = 0; j < v.r; ++j) w.subsets.push_back(mask_to_subset(best_masks[j], v.n));
    return w;
}

CutWitness oracle_on_view(const CellView& v, CutOracle oracle, int restarts,
                          std::uint64_t seed) {
    return oracle == CutOracle::Exact ? exact_on_view(v)
                                      : heuristic_on_view(v, restarts, seed);
}

double subset_mass(const CellView& v, const std::vector<int>& subset) {
    double m = 0;
    for (int c : subset) m += v.masses[c];
    return m;
}

CutDecomposition decompose_view(CellView view, double eps, CutOracle oracle,
                                std::uint64_t seed, int heuristic_restarts,
                                std::vector<double>* out_values) {
    if (!(eps > 0)) throw ArgumentError("cut_decompose: eps must be positive");

    // remainder lives in plain cell values; `view.weighted` tracks B
    std::vector<double> values = view.weighted;
    {
        std::vector<int> c(view.r, 0);
        std::size_t flat = 0;
        do {
            double mass = 1;
            for (int j = 0; j < view.r; ++j) mass *= view.masses[c[j]];
            values[flat] /= mass;
            ++flat;
        } while (next_tuple(c, view.n));
    }

    auto l2 = [&]() {
        std::vector<int> c(view.r, 0);
        std::size_t flat = 0;
        double s = 0;
        do {
            double mass = 1;
            for (int j = 0; j < view.r; ++j) mass *= view.masses[c[j]];
            s += values[flat] * values[flat] * mass;
            ++flat;
        } while (next_tuple(c, view.n));
        return std::sqrt(s);
    };

    CutDecomposition out;
    out.eps = eps;
    out.source_l2 = l2();
    out.exact_certificate = (oracle == CutOracle::Exact);
    out.l2_history.push_back(out.source_l2);

    const double threshold = eps * out.source_l2;
    const std::size_t step_cap =
        out.source_l2 > 0 ? static_cast<std::size_t>(std::ceil(1.0 / (eps * eps))) + 1 : 0;

    std::size_t step = 0;
    double certified = 0;
    while (true) {
        CutWitness w = oracle_on_view(view, oracle, heuristic_restarts,
                                      rng::derive(seed, "cut-decompose-step", step));
        certified = w.value;
        if (out.source_l2 == 0 || w.value < threshold) break;
        if (step >= step_cap)
            throw CapacityError("cut_decompose: step budget exceeded; 2-norm accounting broke");

        double mass_rect = 1;
        for (int j = 0; j < view.r; ++j) mass_rect *= subset_mass(view, w.subsets[j]);
        std::vector<std::uint64_t> masks(view.r, 0);
        for (int j = 0; j < view.r; ++j)
            for (int c : w.subsets[j]) masks[j] |= std::uint64_t(1) << c;
        const double integral = box_sum(view, masks);
        const double d = integral / mass_rect;

        // subtract d on the rectangle, in both value and weighted form
        std::vector<int> c(view.r, 0);
        std::size_t flat = 0;
        do {
            bool inside = true;
            double mass = 1;
            for (int j = 0; j < view.r; ++j) {
                inside = inside && ((masks[j] >> c[j]) & 1);
                mass *= view.masses[c[j]];
            }
            if (inside) {
                values[flat] -= d;
                view.weighted[flat] -= d * mass;
            }
            ++flat;
        } while (next_tuple(c, view.n));

        out.terms.push_back(CutTerm{d, w.subsets});
        out.l2_history.push_back(l2());
        ++step;
    }
    out.certified_remainder_cutnorm = certified;
    if (out_values) *out_values = values;
    return out;
}

} // namespace

CutWitness cut_norm_exact(const RArray& A) { return exact_on_view(view_of(A)); }
CutWitness cut_norm_exact(const StepKernel& W) { return exact_on_view(view_of(W)); }

CutWitness cut_norm_heuristic(const RArray& A, int restarts, std::uint64_t seed) {
    return heuristic_on_view(view_of(A), restarts, seed);
}
CutWitness cut_norm_heuristic(const StepKernel& W, int restarts, std::uint64_t seed) {
    return heuristic_on_view(view_of(W), restarts, seed);
}

double cut_distance(const RArray& F, const RArray& G) {
    if (F.r() != G.r() || F.k() != G.k())
        throw DimensionError("cut_distance: arrays must have identical shape");
    std::vector<double> diff(F.size());
    for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = F.at(i) - G.at(i);
    RArray D(F.r(), F.k(), std::move(diff));
    return cut_norm_exact(D).value / static_cast<double>(D.size());
}

CutDecomposition cut_decompose(const RArray& W, double eps, CutOracle oracle,
                               std::uint64_t seed, int heuristic_restarts) {
    std::vector<double> remainder;
    CutDecomposition out =
        decompose_view(view_of(W), eps, oracle, seed, heuristic_restarts, &remainder);
    out.remainder_array = RArray(W.r(), W.k(), std::move(remainder));
    return out;
}

CutDecomposition cut_decompose(const StepKernel& W, double eps, CutOracle oracle,
                               std::uint64_t seed, int heuristic_restarts) {
    std::vector<double> remainder;
    CutDecomposition out =
        decompose_view(view_of(W), eps, oracle, seed, heuristic_restarts, &remainder);
    out.remainder_kernel = StepKernel(W.r(), W.masses(), std::move(remainder));
    return out;
}

double DeviationStats::quantile(double p) const {
    if (deviations.empty()) return 0;
    std::vector<double> sorted = deviations;
    std::sort(sorted.begin(), sorted.end());
    const double pos = p * (sorted.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(pos);
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = pos - lo;
    return sorted[lo] * (1 - frac) + sorted[hi] * frac;
}

DeviationStats cutnorm_sampling_experiment(const StepKernel& W, int k, int trials,
                                           std::uint64_t seed) {
    const double reference = cut_norm_exact(W).value;
    DeviationStats stats;
    stats.deviations.reserve(trials);
    const bool exact_ok = static_cast<std::size_t>(W.r() - 1) * k <= 24;
    for (int t = 0; t < trials; ++t) {
        const std::uint64_t s = rng::derive(seed, "cutnorm-trial", t);
        SampledGraph H = sample_h(W, k, s);
        const double norm =
            exact_ok ? cut_norm_exact(H.array).value
                     : cut_norm_heuristic(H.array, 64, rng::derive(s, "oracle", 0)).value;
        stats.deviations.push_back(
            std::fabs(norm / static_cast<double>(H.array.size()) - reference));
    }
    return stats;
}

} // namespace gselab
