#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "gselab/core.hpp"

namespace gselab {

enum class SolverKind { Exact, Local, Ascent };
enum class Certificate { Exact, Heuristic };

struct GseResult {
    double value = 0;
    std::optional<IntegerPartition> integer_argmax;
    std::optional<FractionalPartition> fractional_argmax;
    SolverKind solver = SolverKind::Exact;
    Certificate certificate = Certificate::Exact;
    int restarts_used = 0;
};

// Exhaustive maximum over integer partitions (guard q^k <= 2e7), optionally
// restricted to the +-1/k class-count window around a target distribution.
GseResult gse_integer_exact(const LayeredRArray& G, const LayeredInteraction& J,
                            const std::optional<StateDistribution>& micro = {});

// Single-vertex best-move hill climbing with seeded restarts; under a
// microcanonical constraint moves stay inside the count window and swap
// moves are added.
GseResult gse_integer_local(const LayeredRArray& G, const LayeredInteraction& J,
                            int restarts, std::uint64_t seed,
                            const std::optional<StateDistribution>& micro = {});

// Cyclic row-wise maximization from seeded fractional starts. Each row
// update moves to the best basis vector; on zero-diagonal arrays the row
// restriction is affine, so sweeps terminate at an integer vertex.
GseResult gse_fractional_ascent(const LayeredRArray& G, const LayeredInteraction& J,
                                int restarts, std::uint64_t seed);

// Monotone row rounding on the zero-diagonal part of G. Never decreases the
// energy measured on zero_diagonal(G); on general arrays the loss is within
// r^2/(2k) q^r ||G||inf ||J||inf.
IntegerPartition round_to_integer(const LayeredRArray& G, const LayeredInteraction& J,
                                  const FractionalPartition& x);

struct MicroRoundDiagnostics {
    // number of fractional entries after each elimination step
    std::vector<int> fractional_entries;
};

// Null-space elimination over batches of q+1 fractional rows, then a
// largest-remainder completion of the leftover rows. The result keeps every
// class count within 1 of k * a_i.
IntegerPartition round_microcanonical(const LayeredRArray& G, const LayeredInteraction& J,
                                      const FractionalPartition& x, const StateDistribution& a,
                                      MicroRoundDiagnostics* diagnostics = nullptr);

// Entrywise monotone reweighting moving the column means from a to b.
FractionalPartition transport_partition(const FractionalPartition& x,
                                        const StateDistribution& a,
                                        const StateDistribution& b);

// Class-count window of the +-1/k relaxation; throws InfeasibleError when no
// integer counts fit.
struct CountWindow {
    std::vector<int> lo;
    std::vector<int> hi;
};
CountWindow micro_count_window(int k, const StateDistribution& a);

// Largest-remainder integer counts for k * a_i (ties to the lower class).
std::vector<int> largest_remainder_counts(int k, const std::vector<double>& target);

} // namespace gselab
