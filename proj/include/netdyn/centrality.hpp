#pragma once

#include "netdyn/dynamics.hpp"
#include "netdyn/graph.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace netdyn {

enum class Measure { PageRank, Alpha, NormalizedAlpha, Indegree, Outdegree, Eigenvector };

std::string_view to_string(Measure m);
/// Accepts "pagerank", "alpha", "nalpha" (or "normalized_alpha"), "indegree",
/// "outdegree", "eigenvector".
Measure parse_measure(std::string_view name);

struct CentralityScores {
    Measure measure = Measure::Indegree;
    std::optional<double> alpha;
    WeightVector values;
    std::string starting_vector; ///< "uniform", "indegree" or "custom"
};

struct CentralityOptions {
    double tol = 1e-9;
    std::size_t max_iter = 10000;
    /// Relative band around alpha lambda1 = 1 treated as the singular point.
    double guard = 1e-6;
    PowerIterationOptions power{1e-12, 100000, 2000};
};

/**
 * PageRank: the solution of pr = (1 - alpha) s + alpha pr D^-1 A, with the
 * mass of nodes without out-edges spread uniformly. `s` defaults to the
 * uniform distribution and must be a nonnegative vector summing to 1.
 */
CentralityScores pagerank(const DirectedGraph& g, double alpha, std::optional<WeightVector> s = std::nullopt,
                          const CentralityOptions& opts = {});

/**
 * Alpha-Centrality cr = s (I - alpha A)^-1, iterating cr <- s + alpha cr A.
 * `s` defaults to indegree. Defined for 0 <= alpha < 1 / lambda1; throws
 * NumericalError past the bound.
 */
CentralityScores alpha_centrality(const DirectedGraph& g, double alpha, std::optional<WeightVector> s = std::nullopt,
                                  const CentralityOptions& opts = {});

/**
 * Alpha-Centrality scaled to unit L1 norm, for alpha in [0, 1]. Beyond
 * 1 / lambda1 the normalized partial sums s sum_k (alpha A)^k converge to the
 * dominant left eigenvector reached from s, which is what is returned; it
 * does not depend on alpha. `horizon_cap` bounds that iteration.
 */
CentralityScores normalized_alpha_centrality(const DirectedGraph& g, double alpha,
                                             std::optional<WeightVector> s = std::nullopt,
                                             const CentralityOptions& opts = {},
                                             std::size_t horizon_cap = 100000);

/// L1-normalized dominant left eigenvector of A from power iteration.
CentralityScores eigenvector_centrality(const DirectedGraph& g, const CentralityOptions& opts = {});

CentralityScores degree_centrality(const DirectedGraph& g, Measure which);

/// Dispatch by measure; `alpha` is ignored by the degree and eigenvector measures.
CentralityScores compute_centrality(const DirectedGraph& g, Measure measure, double alpha,
                                    const CentralityOptions& opts = {});

/// Nodes ordered by descending score; equal scores keep ascending NodeId.
struct Ranking {
    std::vector<NodeId> order;
    std::vector<std::size_t> rank; ///< rank[node], 1-based
    static constexpr std::string_view tie_policy = "ascending-node-id";
};

Ranking rank(const CentralityScores& scores);
Ranking rank(std::span<const double> values);

} // namespace netdyn
