#include "gselab/gse.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "gselab/rng.hpp"

namespace gselab {

namespace {

void require_real_interactions(const LayeredInteraction& J) {
    for (const auto& j : J)
        if (j.is_table())
            throw ArgumentError("gse: table interactions must pass through canonical_form");
}

// Sum over all tuples containing vertex v of the interaction-weighted terms,
// for an integer assignment. Positions before `j` are forced away from v so
// every tuple is visited once.
double assignment_vertex_terms(const LayeredRArray& G, const LayeredInteraction& J,
                               const std::vector<int>& assign, int v) {
    const int k = G.k(), r = G.r(), q = J.front().q();
    std::vector<int> n(r, 0);
    double s = 0;
    for (int pos = 0; pos < r; ++pos) {
        std::fill(n.begin(), n.end(), 0);
        n[pos] = v;
        // odometer over the free positions; positions < pos skip v
        while (true) {
            bool valid = true;
            for (int j = 0; j < pos && valid; ++j) valid = (n[j] != v);
            if (valid) {
                std::size_t cell = 0;
                for (int j = 0; j < r; ++j) cell = cell * q + assign[n[j]];
                std::size_t flat = 0;
                for (int j = 0; j < r; ++j) flat = flat * k + n[j];
                for (std::size_t e = 0; e < J.size(); ++e)
                    s += J[e].coeff(cell) * G.layer(e).at(flat);
            }
            int j = r - 1;
            for (; j >= 0; --j) {
                if (j == pos) continue;
                if (++n[j] < k) break;
                n[j] = 0;
            }
            if (j < 0) break;
        }
    }
    return s;
}

double assignment_energy(const LayeredRArray& G, const LayeredInteraction& J,
                         const std::vector<int>& assign) {
    IntegerPartition p(G.k(), J.front().q(), assign);
    return layered_energy(G, J, p);
}

std::vector<double> simplex_point(rng::Stream& stream, int q) {
    std::vector<double> row(q);
    double s = 0;
    for (int m = 0; m < q; ++m) {
        row[m] = -std::log(std::max(stream.next_unit(), 1e-300));
        s += row[m];
    }
    for (double& v : row) v /= s;
    return row;
}

} // namespace

CountWindow micro_count_window(int k, const StateDistribution& a) {
    CountWindow w;
    w.lo.resize(a.q());
    w.hi.resize(a.q());
    int lo_sum = 0, hi_sum = 0;
    for (int i = 0; i < a.q(); ++i) {
        w.lo[i] = std::max(0, static_cast<int>(std::ceil(k * a.at(i) - 1 - 1e-9)));
        w.hi[i] = std::min(k, static_cast<int>(std::floor(k * a.at(i) + 1 + 1e-9)));
        lo_sum += w.lo[i];
        hi_sum += w.hi[i];
    }
    if (lo_sum > k || hi_sum < k)
        throw InfeasibleError("microcanonical constraint admits no integer class counts");
    return w;
}

std::vector<int> largest_remainder_counts(int k, const std::vector<double>& target) {
    const int q = static_cast<int>(target.size());
    std::vector<int> counts(q);
    std::vector<std::pair<double, int>> rem(q);
    int used = 0;
    for (int i = 0; i < q; ++i) {
        double t = std::max(0.0, target[i]);
        counts[i] = static_cast<int>(std::floor(t + 1e-12));
        rem[i] = {t - counts[i], i};
        used += counts[i];
    }
    std::sort(rem.begin(), rem.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    });
    for (int i = 0; used < k && i < q; ++i) {
        ++counts[rem[i].second];
        ++used;
    }
    // defensive: if floors overshoot (large targets), trim from the back
    for (int i = q - 1; used > k && i >= 0; --i) {
        int cut = std::min(counts[rem[i].second], used - k);
        counts[rem[i].second] -= cut;
        used -= cut;
    }
    return counts;
}

GseResult gse_integer_exact(const LayeredRArray& G, const LayeredInteraction& J,
                            const std::optional<StateDistribution>& micro) {
    require_real_interactions(J);
    const int k = G.k(), r = G.r(), q = J.front().q();
    if (checked_pow(static_cast<std::size_t>(q), k, 20'000'000) > 20'000'000)
        throw CapacityError("gse_integer_exact: q^k exceeds the 2e7 enumeration guard");

    std::optional<CountWindow> window;
    if (micro) {
        if (micro->q() != q) throw DimensionError("gse_integer_exact: micro target has wrong q");
        window = micro_count_window(k, *micro);
    }

    std::vector<int> assign(k, 0);
    std::vector<int> counts(q, 0);
    std::vector<int> best_assign;
    double best = -std::numeric_limits<double>::infinity();

    // DFS over vertices with incremental sums: assigning vertex d adds every
    // tuple inside [d+1]^r that touches d.
    std::vector<int> n(r, 0);
    std::function<void(int, double)> dfs = [&](int d, double acc) {
        if (d == k) {
            if (acc > best) {
                best = acc;
                best_assign = assign;
            }
            return;
        }
        int deficit = 0;
        if (window)
            for (int s = 0; s < q; ++s) deficit += std::max(0, window->lo[s] - counts[s]);
        for (int s = 0; s < q; ++s) {
            if (window) {
                if (counts[s] >= window->hi[s]) continue;
                const int deficit_after =
                    deficit - (counts[s] < window->lo[s] ? 1 : 0);
                if (deficit_after > k - d - 1) continue;
            }
            assign[d] = s;
            ++counts[s];
            double delta = 0;
            // tuples in [d+1]^r containing d
            std::fill(n.begin(), n.end(), 0);
            while (true) {
                bool touches = false;
                for (int j = 0; j < r; ++j) touches |= (n[j] == d);
                if (touches) {
                    std::size_t cell = 0;
                    for (int j = 0; j < r; ++j) cell = cell * q + assign[n[j]];
                    std::size_t flat = 0;
                    for (int j = 0; j < r; ++j) flat = flat * k + n[j];
                    for (std::size_t e = 0; e < J.size(); ++e)
                        delta += J[e].coeff(cell) * G.layer(e).at(flat);
                }
                if (!next_tuple(n, d + 1)) break;
            }
            dfs(d + 1, acc + delta);
            --counts[s];
        }
    };
    dfs(0, 0.0);

    if (best_assign.empty())
        throw InfeasibleError("gse_integer_exact: constraint window excluded every partition");

    GseResult res;
    res.integer_argmax = IntegerPartition(k, q, best_assign);
    res.value = assignment_energy(G, J, best_assign);
    res.solver = SolverKind::Exact;
    res.certificate = Certificate::Exact;
    return res;
}

GseResult gse_integer_local(const LayeredRArray& G, const LayeredInteraction& J,
                            int restarts, std::uint64_t seed,
                            const std::optional<StateDistribution>& micro) {
    require_real_interactions(J);
    const int k = G.k(), q = J.front().q();
    std::optional<CountWindow> window;
    std::vector<int> target_counts;
    if (micro) {
        if (micro->q() != q) throw DimensionError("gse_integer_local: micro target has wrong q");
        window = micro_count_window(k, *micro);
        target_counts = largest_remainder_counts(k, [&] {
            std::vector<double> t(q);
            for (int i = 0; i < q; ++i) t[i] = k * micro->at(i);
            return t;
        }());
    }

    GseResult best;
    best.value = -std::numeric_limits<double>::infinity();
    best.solver = SolverKind::Local;
    best.certificate = Certificate::Heuristic;
    best.restarts_used = std::max(restarts, 1);

    for (int restart = 0; restart < std::max(restarts, 1); ++restart) {
        rng::Stream stream(rng::derive(seed, "gse-local-restart", restart), "start");
        std::vector<int> assign(k);
        if (micro) {
            std::vector<int> order(k);
            for (int i = 0; i < k; ++i) order[i] = i;
            for (int i = 0; i < k; ++i) std::swap(order[i], order[i + stream.next_below(k - i)]);
            int pos = 0;
            for (int s = 0; s < q; ++s)
                for (int c = 0; c < target_counts[s]; ++c) assign[order[pos++]] = s;
            while (pos < k) assign[order[pos++]] = q - 1;
        } else {
            for (int i = 0; i < k; ++i) assign[i] = stream.next_below(q);
        }

        std::vector<int> counts(q, 0);
        for (int s : assign) ++counts[s];

        double energy_now = assignment_energy(G, J, assign);
        const double norm = std::pow(static_cast<double>(k), G.r());
        for (int sweep = 0; sweep < 500; ++sweep) {
            bool changed = false;
            for (int v = 0; v < k; ++v) {
                const int from = assign[v];
                const double base = assignment_vertex_terms(G, J, assign, v);
                int best_state = from;
                double best_gain = 0;
                for (int s = 0; s < q; ++s) {
                    if (s == from) continue;
                    if (window && (counts[s] >= window->hi[s] || counts[from] <= window->lo[from]))
                        continue;
                    assign[v] = s;
                    const double gain =
                        (assignment_vertex_terms(G, J, assign, v) - base) / norm;
                    assign[v] = from;
                    if (gain > best_gain + 1e-15) {
                        best_gain = gain;
                        best_state = s;
                    }
                }
                if (best_state != from) {
                    assign[v] = best_state;
                    --counts[from];
                    ++counts[best_state];
                    energy_now += best_gain;
                    changed = true;
                }
            }
            if (micro) {
                // swap moves keep class sizes intact
                for (int v = 0; v < k; ++v) {
                    for (int u = v + 1; u < k; ++u) {
                        if (assign[v] == assign[u]) continue;
                        const double before = assignment_vertex_terms(G, J, assign, v) +
                                              assignment_vertex_terms(G, J, assign, u);
                        std::swap(assign[v], assign[u]);
                        const double after = assignment_vertex_terms(G, J, assign, v) +
                                             assignment_vertex_terms(G, J, assign, u);
                        // tuples holding both v and u are double-counted on
                        // both sides of the difference only when their term
                        // changed; recompute exactly instead of trusting it
                        if (after - before > 1e-15) {
                            const double fresh = assignment_energy(G, J, assign);
                            if (fresh > energy_now + 1e-15) {
                                energy_now = fresh;
                                changed = true;
                                continue;
                            }
                        }
                        std::swap(assign[v], assign[u]);
                    }
                }
            }
            if (!changed) break;
        }

        const double value = assignment_energy(G, J, assign);
        if (value > best.value) {
            best.value = value;
            best.integer_argmax = IntegerPartition(k, q, assign);
        }
    }
    return best;
}

GseResult gse_fractional_ascent(const LayeredRArray& G, const LayeredInteraction& J,
                                int restarts, std::uint64_t seed) {
    require_real_interactions(J);
    const int k = G.k(), q = J.front().q();

    GseResult best;
    best.value = -std::numeric_limits<double>::infinity();
    best.solver = SolverKind::Ascent;
    best.certificate = Certificate::Heuristic;
    best.restarts_used = std::max(restarts, 1);

    for (int restart = 0; restart < std::max(restarts, 1); ++restart) {
        rng::Stream stream(rng::derive(seed, "gse-ascent-restart", restart), "start");
        std::vector<double> w(static_cast<std::size_t>(k) * q);
        for (int v = 0; v < k; ++v) {
            std::vector<double> row = simplex_point(stream, q);
            for (int m = 0; m < q; ++m) w[static_cast<std::size_t>(v) * q + m] = row[m];
        }
        FractionalPartition x = FractionalPartition::checked(k, q, std::move(w));
        double current = layered_energy(G, J, x);

        std::vector<double> basis(q, 0.0);
        for (int sweep = 0; sweep < 1000; ++sweep) {
            const double sweep_start = current;
            for (int v = 0; v < k; ++v) {
                std::vector<double> row(q);
                for (int m = 0; m < q; ++m) row[m] = x.at(v, m);
                const double here = energy_row_terms(G, J, x, v, row);
                int best_m = -1;
                double best_val = here - 1e-15;
                for (int m = 0; m < q; ++m) {
                    std::fill(basis.begin(), basis.end(), 0.0);
                    basis[m] = 1.0;
                    const double val = energy_row_terms(G, J, x, v, basis);
                    if (val > best_val) {
                        best_val = val;
                        best_m = m;
                    }
                }
                if (best_m >= 0) {
                    std::fill(basis.begin(), basis.end(), 0.0);
                    basis[best_m] = 1.0;
                    x = x.with_row(v, basis);
                    current += best_val - here;
                }
            }
            current = layered_energy(G, J, x);
            if (current - sweep_start < 1e-12) break;
        }

        if (current > best.value) {
            best.value = current;
            best.fractional_argmax = x;
            if (x.is_integer(1e-9)) {
                std::vector<int> assign(k);
                for (int v = 0; v < k; ++v)
                    for (int m = 0; m < q; ++m)
                        if (x.at(v, m) > 0.5) assign[v] = m;
                best.integer_argmax = IntegerPartition(k, q, assign);
            }
        }
    }
    return best;
}

IntegerPartition round_to_integer(const LayeredRArray& G, const LayeredInteraction& J,
                                  const FractionalPartition& x) {
    require_real_interactions(J);
    const int k = G.k(), q = J.front().q();
    if (x.k() != k || x.q() != q)
        throw DimensionError("round_to_integer: partition shape disagrees with the instance");

    const LayeredRArray Gz = is_zero_diagonal(G) ? G : zero_diagonal(G);
    FractionalPartition cur = x;
    std::vector<int> assign(k, 0);
    std::vector<double> basis(q, 0.0);
    for (int v = 0; v < k; ++v) {
        // affine in row v on the zero-diagonal part: the best basis vector
        // never decreases the energy
        std::vector<double> g = energy_row_gradient(Gz, J, cur, v);
        int best_m = 0;
        for (int m = 1; m < q; ++m)
            if (g[m] > g[best_m]) best_m = m;
        std::fill(basis.begin(), basis.end(), 0.0);
        basis[best_m] = 1.0;
        cur = cur.with_row(v, basis);
        assign[v] = best_m;
    }
    return IntegerPartition(k, q, assign);
}

namespace {

// One null-space direction of the fixed class/row sums over the fractional
// entries of the selected rows. Gaussian elimination, pivot tolerance 1e-10,
// first free column wins.
std::vector<double> null_direction(const std::vector<std::vector<double>>& rows, int cols) {
    std::vector<std::vector<double>> m = rows;
    const int nrows = static_cast<int>(m.size());
    std::vector<int> pivot_col(nrows, -1);
    int rank = 0;
    for (int c = 0; c < cols && rank < nrows; ++c) {
        int sel = -1;
        double best = 1e-10;
        for (int r = rank; r < nrows; ++r)
            if (std::fabs(m[r][c]) > best) {
                best = std::fabs(m[r][c]);
                sel = r;
            }
        if (sel < 0) continue;
        std::swap(m[rank], m[sel]);
        const double inv = 1.0 / m[rank][c];
        for (int cc = c; cc < cols; ++cc) m[rank][cc] *= inv;
        for (int r = 0; r < nrows; ++r) {
            if (r == rank) continue;
            const double f = m[r][c];
            if (f == 0.0) continue;
            for (int cc = c; cc < cols; ++cc) m[r][cc] -= f * m[rank][cc];
        }
        pivot_col[rank] = c;
        ++rank;
    }
    std::vector<bool> is_pivot(cols, false);
    for (int r = 0; r < rank; ++r) is_pivot[pivot_col[r]] = true;
    for (int free = 0; free < cols; ++free) {
        if (is_pivot[free]) continue;
        std::vector<double> beta(cols, 0.0);
        beta[free] = 1.0;
        for (int r = 0; r < rank; ++r) beta[pivot_col[r]] = -m[r][free];
        double norm = 0;
        for (double b : beta) norm = std::max(norm, std::fabs(b));
        if (norm > 0) return beta;
    }
    return {};
}

} // namespace

IntegerPartition round_microcanonical(const LayeredRArray& G, const LayeredInteraction& J,
                                      const FractionalPartition& x, const StateDistribution& a,
                                      MicroRoundDiagnostics* diagnostics) {
    require_real_interactions(J);
    const int k = G.k(), q = J.front().q();
    if (x.k() != k || x.q() != q || a.q() != q)
        throw DimensionError("round_microcanonical: shapes disagree");
    {
        std::vector<double> means = x.column_means();
        for (int i = 0; i < q; ++i)
            if (std::fabs(means[i] - a.at(i)) > 1e-9)
                throw ArgumentError("round_microcanonical: column means of x do not match a");
    }

    std::vector<double> w = x.weights();
    auto snap = [&](double& v) {
        if (std::fabs(v) < 1e-12) v = 0;
        if (std::fabs(v - 1.0) < 1e-12) v = 1;
    };
    for (double& v : w) snap(v);

    auto is_fractional = [&](int v, int m) {
        const double t = w[static_cast<std::size_t>(v) * q + m];
        return t > 0.0 && t < 1.0;
    };
    auto bad_nodes = [&]() {
        std::vector<int> bad;
        for (int v = 0; v < k; ++v) {
            int frac = 0;
            for (int m = 0; m < q; ++m) frac += is_fractional(v, m);
            if (frac > 0) bad.push_back(v);
        }
        return bad;
    };
    auto fractional_count = [&]() {
        int c = 0;
        for (int v = 0; v < k; ++v)
            for (int m = 0; m < q; ++m) c += is_fractional(v, m);
        return c;
    };

    if (diagnostics) diagnostics->fractional_entries.push_back(fractional_count());

    while (true) {
        std::vector<int> bad = bad_nodes();
        if (static_cast<int>(bad.size()) <= q) break;
        bad.resize(q + 1); // lowest-index batch

        // variables: fractional entries of rows in the batch
        std::vector<std::pair<int, int>> vars;
        for (int v : bad)
            for (int m = 0; m < q; ++m)
                if (is_fractional(v, m)) vars.emplace_back(v, m);

        // 2q+1 equalities: q class sums over the batch, q+1 row sums
        std::vector<std::vector<double>> rows(
            static_cast<std::size_t>(2 * q + 1),
            std::vector<double>(vars.size(), 0.0));
        for (std::size_t c = 0; c < vars.size(); ++c) {
            const auto [v, m] = vars[c];
            rows[m][c] = 1.0; // class sum m
            for (std::size_t b = 0; b < bad.size(); ++b)
                if (bad[b] == v) rows[q + b][c] = 1.0; // row sum of v
        }
        std::vector<double> beta = null_direction(rows, static_cast<int>(vars.size()));
        if (beta.empty())
            throw DomainError("round_microcanonical: no null direction found");

        // admissible parameter range keeping all entries in [0,1]
        double t_pos = std::numeric_limits<double>::infinity();
        double t_neg = std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < vars.size(); ++c) {
            if (beta[c] == 0.0) continue;
            const auto [v, m] = vars[c];
            const double value = w[static_cast<std::size_t>(v) * q + m];
            if (beta[c] > 0) {
                t_pos = std::min(t_pos, (1.0 - value) / beta[c]);
                t_neg = std::min(t_neg, value / beta[c]);
            } else {
                t_pos = std::min(t_pos, value / (-beta[c]));
                t_neg = std::min(t_neg, (1.0 - value) / (-beta[c]));
            }
        }

        // first derivative of the energy along beta; ties go to +t
        FractionalPartition xf = FractionalPartition::checked(k, q, w);
        double c1 = 0;
        for (int v : bad) {
            std::vector<double> g = energy_row_gradient(G, J, xf, v);
            for (std::size_t c = 0; c < vars.size(); ++c)
                if (vars[c].first == v) c1 += beta[c] * g[vars[c].second];
        }
        const double t0 = (c1 >= 0) ? t_pos : -t_neg;

        for (std::size_t c = 0; c < vars.size(); ++c) {
            double& value = w[static_cast<std::size_t>(vars[c].first) * q + vars[c].second];
            value += t0 * beta[c];
            snap(value);
            value = std::clamp(value, 0.0, 1.0);
        }
        // at the boundary at least one entry must have left (0,1)
        if (diagnostics) diagnostics->fractional_entries.push_back(fractional_count());
    }

    // completion: integer counts already fixed, leftover bad rows are placed
    // by largest-remainder rounding of the residual class masses
    std::vector<int> assign(k, -1);
    std::vector<double> residual(q);
    for (int i = 0; i < q; ++i) residual[i] = k * a.at(i);
    std::vector<int> leftover;
    for (int v = 0; v < k; ++v) {
        int state = -1;
        for (int m = 0; m < q; ++m)
            if (w[static_cast<std::size_t>(v) * q + m] == 1.0) state = m;
        if (state >= 0) {
            assign[v] = state;
            residual[state] -= 1.0;
        } else {
            leftover.push_back(v);
        }
    }
    if (!leftover.empty()) {
        std::vector<int> fills =
            largest_remainder_counts(static_cast<int>(leftover.size()), residual);
        std::size_t pos = 0;
        for (int s = 0; s < q; ++s)
            for (int c = 0; c < fills[s] && pos < leftover.size(); ++c)
                assign[leftover[pos++]] = s;
        while (pos < leftover.size()) assign[leftover[pos++]] = q - 1;
    }
    return IntegerPartition(k, q, assign);
}

FractionalPartition transport_partition(const FractionalPartition& x,
                                        const StateDistribution& a,
                                        const StateDistribution& b) {
    const int k = x.k(), q = x.q();
    if (a.q() != q || b.q() != q) throw DimensionError("transport_partition: mismatched q");
    {
        std::vector<double> means = x.column_means();
        for (int i = 0; i < q; ++i)
            if (std::fabs(means[i] - a.at(i)) > 1e-9)
                throw ArgumentError("transport_partition: column means of x do not match a");
    }
    double moved = 0;
    for (int i = 0; i < q; ++i) moved += std::max(a.at(i) - b.at(i), 0.0);
    if (moved <= 0) return x;

    std::vector<double> w = x.weights();
    for (int v = 0; v < k; ++v) {
        double freed = 0;
        for (int i = 0; i < q; ++i) {
            if (a.at(i) > b.at(i) && a.at(i) > 0) {
                double& entry = w[static_cast<std::size_t>(v) * q + i];
                const double keep = b.at(i) / a.at(i);
                freed += entry * (1.0 - keep);
                entry *= keep;
            }
        }
        for (int i = 0; i < q; ++i) {
            if (b.at(i) > a.at(i))
                w[static_cast<std::size_t>(v) * q + i] += freed * (b.at(i) - a.at(i)) / moved;
        }
    }
    return FractionalPartition::normalized(k, q, std::move(w));
}

} // namespace gselab
