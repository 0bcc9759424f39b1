#include "netdyn/centrality.hpp"

#include "netdyn/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace netdyn {

std::string_view to_string(Measure m) {
    switch (m) {
    case Measure::PageRank: return "pagerank";
    case Measure::Alpha: return "alpha";
    case Measure::NormalizedAlpha: return "nalpha";
    case Measure::Indegree: return "indegree";
    case Measure::Outdegree: return "outdegree";
    case Measure::Eigenvector: return "eigenvector";
    }
    return "?";
}

Measure parse_measure(std::string_view name) {
    if (name == "pagerank") return Measure::PageRank;
    if (name == "alpha") return Measure::Alpha;
    if (name == "nalpha" || name == "normalized_alpha") return Measure::NormalizedAlpha;
    if (name == "indegree") return Measure::Indegree;
    if (name == "outdegree") return Measure::Outdegree;
    if (name == "eigenvector") return Measure::Eigenvector;
    throw InvalidArgument("unknown centrality measure '" + std::string(name) + "'");
}

namespace {

// Successive-difference stopping rule shared by the fixed-point solvers:
// the tail of a contraction with factor rho is at most rho / (1 - rho) times
// the last change. Changes at rounding level also end the iteration.
bool settled(double diff, double rho, double tol, double scale) {
    const double tail = rho < 1.0 ? std::max(1.0, rho / (1.0 - rho)) : 1.0;
    return diff * tail <= tol || diff <= 1e-15 * scale;
}

void check_start(const DirectedGraph& g, const WeightVector& s, const char* who) {
    check_size(g, s, who);
    for (double v : s)
        if (!std::isfinite(v) || v < 0.0)
            throw InvalidArgument(std::string(who) + ": starting vector must be finite and nonnegative");
}

WeightVector scaled_to_unit(WeightVector v) {
    const double norm = l1_norm(v);
    if (norm == 0.0)
        throw NumericalError("centrality scores are identically zero; cannot normalize");
    for (double& x : v)
        x /= norm;
    return v;
}

} // namespace

CentralityScores pagerank(const DirectedGraph& g, double alpha, std::optional<WeightVector> s,
                          const CentralityOptions& opts) {
    if (!(alpha >= 0.0 && alpha < 1.0))
        throw InvalidArgument("pagerank: damping factor must lie in [0, 1)");
    const std::size_t n = g.node_count();
    if (n == 0)
        throw InvalidArgument("pagerank: empty graph");
    const bool uniform = !s;
    if (uniform)
        s = WeightVector(n, 1.0 / static_cast<double>(n));
    check_start(g, *s, "pagerank");
    if (std::abs(l1_norm(*s) - 1.0) > 1e-9)
        throw InvalidArgument("pagerank: starting vector must sum to 1");

    CentralityScores out{Measure::PageRank, alpha, *s, uniform ? "uniform" : "custom"};
    if (alpha == 0.0)
        return out;

    std::vector<double> inv_out(n, 0.0);
    for (NodeId u = 0; u < n; ++u)
        if (g.out_degree(u) > 0)
            inv_out[u] = 1.0 / static_cast<double>(g.out_degree(u));

    WeightVector& pr = out.values;
    WeightVector next(n);
    for (std::size_t it = 0; it < opts.max_iter; ++it) {
        double dangling = 0.0;
        for (NodeId u = 0; u < n; ++u)
            if (g.out_degree(u) == 0)
                dangling += pr[u];
        const double teleport = alpha * dangling / static_cast<double>(n);
        double diff = 0.0;
        for (NodeId v = 0; v < n; ++v) {
            double acc = 0.0;
            for (NodeId u : g.in_neighbors(v))
                acc += pr[u] * inv_out[u];
            next[v] = (1.0 - alpha) * (*s)[v] + alpha * acc + teleport;
            diff += std::abs(next[v] - pr[v]);
        }
        pr.swap(next);
        if (settled(diff, alpha, opts.tol, 1.0))
            return out;
    }
    throw NonConvergence("pagerank did not converge in " + std::to_string(opts.max_iter) + " iterations",
                         pr, alpha, 0.0, opts.max_iter);
}

CentralityScores alpha_centrality(const DirectedGraph& g, double alpha, std::optional<WeightVector> s,
                                  const CentralityOptions& opts) {
    if (!(alpha >= 0.0) || !std::isfinite(alpha))
        throw InvalidArgument("alpha_centrality: alpha must be finite and nonnegative");
    const bool indegree = !s;
    if (indegree)
        s = indegree_vector(g);
    check_start(g, *s, "alpha_centrality");

    CentralityScores out{Measure::Alpha, alpha, *s, indegree ? "indegree" : "custom"};
    if (alpha == 0.0)
        return out;

    const double rho = alpha * spectral_radius(g, opts.power).lambda1;
    if (rho >= 1.0 - opts.guard)
        throw NumericalError("beyond spectral bound; use normalized variant (alpha * lambda1 = " +
                             std::to_string(rho) + ")");

    WeightVector& cr = out.values;
    for (std::size_t it = 0; it < opts.max_iter; ++it) {
        WeightVector next = adjacency_apply(g, cr);
        double diff = 0.0;
        for (std::size_t i = 0; i < next.size(); ++i) {
            next[i] = (*s)[i] + alpha * next[i];
            diff += std::abs(next[i] - cr[i]);
        }
        cr.swap(next);
        if (settled(diff, rho, opts.tol, l1_norm(cr)))
            return out;
    }
    throw NonConvergence("alpha centrality did not converge in " + std::to_string(opts.max_iter) + " iterations",
                         cr, rho, 0.0, opts.max_iter);
}

CentralityScores normalized_alpha_centrality(const DirectedGraph& g, double alpha, std::optional<WeightVector> s,
                                             const CentralityOptions& opts, std::size_t horizon_cap) {
    if (!(alpha >= 0.0 && alpha <= 1.0))
        throw InvalidArgument("normalized_alpha_centrality: alpha must lie in [0, 1]");
    const bool indegree = !s;
    if (indegree)
        s = indegree_vector(g);
    check_start(g, *s, "normalized_alpha_centrality");
    const std::string start = indegree ? "indegree" : "custom";

    const double lambda1 = alpha > 0.0 ? spectral_radius(g, opts.power).lambda1 : 0.0;
    const double rho = alpha * lambda1;
    if (std::abs(rho - 1.0) <= opts.guard)
        throw NumericalError("at spectral singularity: alpha * lambda1 = " + std::to_string(rho));

    if (rho < 1.0) {
        auto cr = alpha_centrality(g, alpha, s, opts);
        return {Measure::NormalizedAlpha, alpha, scaled_to_unit(std::move(cr.values)), start};
    }

    // The partial sums grow like (alpha lambda_s)^t, lambda_s being the growth
    // rate of s A^k. When that rate is still subcritical the series converges
    // even though alpha exceeds 1 / lambda1.
    PowerIterationOptions power = opts.power;
    power.max_iter = horizon_cap;
    const auto dominant = power_iteration_from(g, *s, power);
    const double rho_s = alpha * dominant.lambda1;
    if (rho_s < 1.0 - opts.guard) {
        WeightVector sum = *s;
        WeightVector term = *s;
        for (std::size_t k = 0; k < horizon_cap; ++k) {
            term = adjacency_apply(g, term);
            double diff = 0.0;
            for (std::size_t i = 0; i < term.size(); ++i) {
                term[i] *= alpha;
                sum[i] += term[i];
                diff += term[i];
            }
            if (diff == 0.0 || settled(diff, rho_s, opts.tol, l1_norm(sum)))
                return {Measure::NormalizedAlpha, alpha, scaled_to_unit(std::move(sum)), start};
        }
        throw NonConvergence("normalized alpha centrality series did not settle within the horizon cap",
                             sum, rho_s, 0.0, horizon_cap);
    }
    return {Measure::NormalizedAlpha, alpha, dominant.eigvec, start};
}

CentralityScores eigenvector_centrality(const DirectedGraph& g, const CentralityOptions& opts) {
    auto est = power_iteration(g, opts.power);
    return {Measure::Eigenvector, std::nullopt, std::move(est.eigvec), "uniform"};
}

CentralityScores degree_centrality(const DirectedGraph& g, Measure which) {
    if (which == Measure::Indegree)
        return {Measure::Indegree, std::nullopt, indegree_vector(g), ""};
    if (which == Measure::Outdegree)
        return {Measure::Outdegree, std::nullopt, outdegree_vector(g), ""};
    throw InvalidArgument("degree_centrality: measure must be indegree or outdegree");
}

CentralityScores compute_centrality(const DirectedGraph& g, Measure measure, double alpha,
                                    const CentralityOptions& opts) {
    switch (measure) {
    case Measure::PageRank: return pagerank(g, alpha, std::nullopt, opts);
    case Measure::Alpha: return alpha_centrality(g, alpha, std::nullopt, opts);
    case Measure::NormalizedAlpha: return normalized_alpha_centrality(g, alpha, std::nullopt, opts);
    case Measure::Eigenvector: return eigenvector_centrality(g, opts);
    case Measure::Indegree:
    case Measure::Outdegree: return degree_centrality(g, measure);
    }
    throw InvalidArgument("unknown measure");
}

Ranking rank(std::span<const double> values) {
    Ranking r;
    r.order.resize(values.size());
    std::iota(r.order.begin(), r.order.end(), NodeId{0});
    std::stable_sort(r.order.begin(), r.order.end(),
                     [&](NodeId a, NodeId b) { return values[a] > values[b]; });
    r.rank.resize(values.size());
    for (std::size_t pos = 0; pos < r.order.size(); ++pos)
        r.rank[r.order[pos]] = pos + 1;
    return r;
}

Ranking rank(const CentralityScores& scores) { return rank(scores.values); }

} // namespace netdyn
