#include "netdyn/dynamics.hpp"

#include "netdyn/error.hpp"
#include "netdyn/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace netdyn {

namespace {

bool in_unit(double v) { return v >= 0.0 && v <= 1.0; }

double l1_diff(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        s += std::abs(a[i] - b[i]);
    return s;
}

std::string history(const std::vector<double>& diffs) {
    std::ostringstream out;
    const std::size_t from = diffs.size() > 5 ? diffs.size() - 5 : 0;
    out << "last L1 changes:";
    for (std::size_t i = from; i < diffs.size(); ++i)
        out << ' ' << diffs[i];
    return out.str();
}

} // namespace

void ProcessConfig::validate() const {
    if (kind == ProcessKind::Conservative) {
        if (!in_unit(alpha) || !in_unit(delta))
            throw InvalidArgument("conservative process needs alpha and delta in [0, 1]");
    } else {
        if (!(alpha >= 0.0) || !std::isfinite(alpha))
            throw InvalidArgument("nonconservative process needs alpha >= 0");
        if (!(delta >= 0.0) || !std::isfinite(delta))
            throw InvalidArgument("nonconservative process needs delta >= 0");
    }
}

void SisConfig::validate() const {
    if (!in_unit(mu) || !in_unit(beta))
        throw InvalidArgument("SIS rates mu and beta must lie in [0, 1]");
}

WeightVector conservative_step(const DirectedGraph& g, std::span<const double> x_prev,
                               std::span<const double> x0, const ProcessConfig& cfg) {
    if (cfg.kind != ProcessKind::Conservative)
        throw InvalidArgument("conservative_step: process is not conservative");
    cfg.validate();
    check_size(g, x_prev, "conservative_step");
    check_size(g, x0, "conservative_step");
    WeightVector y = transfer_apply(g, x_prev, cfg.delta, cfg.dangling);
    for (std::size_t i = 0; i < y.size(); ++i)
        y[i] = (1.0 - cfg.alpha) * x0[i] + cfg.alpha * y[i];
    return y;
}

WeightVector conservative_steady_state(const DirectedGraph& g, std::span<const double> x0,
                                       const ProcessConfig& cfg, const SolverOptions& opts) {
    cfg.validate();
    check_size(g, x0, "conservative_steady_state");
    WeightVector x(x0.begin(), x0.end());
    if (cfg.alpha == 0.0)
        return x;
    const double tail = cfg.alpha < 1.0 ? std::max(1.0, cfg.alpha / (1.0 - cfg.alpha)) : 1.0;
    std::vector<double> diffs;
    for (std::size_t it = 0; it < opts.max_iter; ++it) {
        WeightVector next = conservative_step(g, x, x0, cfg);
        const double d = l1_diff(next, x);
        x = std::move(next);
        diffs.push_back(d);
        if (d * tail <= opts.tol)
            return x;
    }
    throw NonConvergence("conservative steady state did not converge in " + std::to_string(opts.max_iter) +
                             " iterations; " + history(diffs),
                         x, cfg.alpha, diffs.back(), opts.max_iter);
}

WeightVector nonconservative_step(const DirectedGraph& g, std::span<const double> delta_prev,
                                  const ProcessConfig& cfg) {
    if (cfg.kind != ProcessKind::Nonconservative)
        throw InvalidArgument("nonconservative_step: process is not nonconservative");
    cfg.validate();
    WeightVector y = replication_apply(g, delta_prev, cfg.delta, cfg.alpha);
    for (double& v : y)
        v *= cfg.alpha;
    return y;
}

WeightVector nonconservative_accumulate(const DirectedGraph& g, std::span<const double> x0,
                                        const ProcessConfig& cfg, Horizon horizon,
                                        const SolverOptions& opts) {
    if (cfg.kind != ProcessKind::Nonconservative)
        throw InvalidArgument("nonconservative_accumulate: process is not nonconservative");
    cfg.validate();
    check_size(g, x0, "nonconservative_accumulate");
    if (cfg.delta > 0.0 && cfg.alpha == 0.0)
        throw InvalidArgument("undefined self-replication: alpha = 0 with delta > 0");

    WeightVector x(x0.begin(), x0.end());
    WeightVector delta(x0.begin(), x0.end());
    if (horizon) {
        for (std::size_t k = 0; k < *horizon; ++k) {
            delta = nonconservative_step(g, delta, cfg);
            for (std::size_t i = 0; i < x.size(); ++i)
                x[i] += delta[i];
        }
        return x;
    }

    double rho = cfg.delta;
    if (cfg.alpha > 0.0)
        rho += cfg.alpha * spectral_radius(g).lambda1;
    if (rho >= 1.0)
        throw NumericalError("supercritical: alpha * lambda1(R) = " + std::to_string(rho) +
                             " >= 1, the accumulated weight diverges");
    // Remaining sum after term k is bounded by ||Delta_k|| rho / (1 - rho)
    // once the iterates align with the dominant direction.
    const double tail = rho / (1.0 - rho);
    for (std::size_t k = 0; k < opts.max_iter; ++k) {
        delta = nonconservative_step(g, delta, cfg);
        double norm = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            x[i] += delta[i];
            norm += std::abs(delta[i]);
        }
        if (norm == 0.0 || std::max(norm, norm * tail) <= opts.tol)
            return x;
    }
    throw NonConvergence("nonconservative accumulation did not settle in " + std::to_string(opts.max_iter) +
                             " terms",
                         x, rho, l1_norm(delta), opts.max_iter);
}

WeightVector sis_step(const DirectedGraph& g, std::span<const double> p_prev, const SisConfig& cfg) {
    cfg.validate();
    check_size(g, p_prev, "sis_step");
    for (double p : p_prev)
        if (!(p >= 0.0))
            throw InvalidArgument("sis_step: infection scores must be nonnegative");
    WeightVector y = adjacency_apply(g, p_prev);
    for (std::size_t i = 0; i < y.size(); ++i)
        y[i] = (1.0 - cfg.beta) * p_prev[i] + cfg.mu * y[i];
    return y;
}

namespace {

void validate_cascade_args(const DirectedGraph& g, std::span<const NodeId> seeds, double transmissibility) {
    if (!in_unit(transmissibility))
        throw InvalidArgument("transmissibility must lie in [0, 1]");
    if (seeds.empty())
        throw InvalidArgument("independent cascade needs at least one seed");
    for (NodeId s : seeds)
        if (s >= g.node_count())
            throw InvalidArgument("seed " + std::to_string(s) + " is not a node of the graph");
}

// Runs the cascade into `round` (kNever-filled scratch) and returns the
// number of infected nodes; `frontier`/`next` are reusable buffers.
std::size_t run_cascade(const DirectedGraph& g, std::span<const NodeId> seeds, double p,
                        const CounterRng& edge_stream, std::vector<std::uint32_t>& round,
                        std::vector<NodeId>* parent, std::vector<NodeId>* order,
                        std::vector<NodeId>& frontier, std::vector<NodeId>& next) {
    frontier.clear();
    for (NodeId s : seeds) {
        if (round[s] == CascadeTrace::kNever) {
            round[s] = 0;
            if (parent)
                (*parent)[s] = s;
            frontier.push_back(s);
        }
    }
    std::sort(frontier.begin(), frontier.end());
    std::size_t infected = frontier.size();
    if (order)
        order->insert(order->end(), frontier.begin(), frontier.end());

    for (std::uint32_t r = 1; !frontier.empty() && p > 0.0; ++r) {
        next.clear();
        for (NodeId u : frontier) {
            const auto nb = g.out_neighbors(u);
            for (std::size_t slot = 0; slot < nb.size(); ++slot) {
                const NodeId v = nb[slot];
                if (round[v] != CascadeTrace::kNever)
                    continue;
                if (edge_stream.uniform(g.edge_index(u, slot)) < p) {
                    round[v] = r;
                    if (parent)
                        (*parent)[v] = u;
                    next.push_back(v);
                }
            }
        }
        std::sort(next.begin(), next.end());
        infected += next.size();
        if (order)
            order->insert(order->end(), next.begin(), next.end());
        std::swap(frontier, next);
    }
    return infected;
}

} // namespace

CascadeTrace simulate_cascade(const DirectedGraph& g, std::span<const NodeId> seeds,
                              double transmissibility, const CounterRng& rng) {
    validate_cascade_args(g, seeds, transmissibility);
    CascadeTrace trace;
    trace.round.assign(g.node_count(), CascadeTrace::kNever);
    trace.parent.assign(g.node_count(), 0);
    std::vector<NodeId> frontier, next;
    run_cascade(g, seeds, transmissibility, rng, trace.round, &trace.parent, &trace.order, frontier, next);
    return trace;
}

std::vector<NodeId> independent_cascade(const DirectedGraph& g, std::span<const NodeId> seeds,
                                        double transmissibility, std::uint64_t rng_seed) {
    auto trace = simulate_cascade(g, seeds, transmissibility, CounterRng(rng_seed));
    std::sort(trace.order.begin(), trace.order.end());
    return trace.order;
}

std::vector<CascadeRunStats> threshold_sweep(const DirectedGraph& g, std::span<const double> grid,
                                             std::size_t trials, std::uint64_t rng_seed) {
    if (trials == 0)
        throw InvalidArgument("threshold_sweep: trials must be at least 1");
    if (g.node_count() == 0)
        throw InvalidArgument("threshold_sweep: empty graph");
    for (double p : grid)
        if (!in_unit(p))
            throw InvalidArgument("threshold_sweep: grid values must lie in [0, 1]");

    const CounterRng root(rng_seed);
    const double n = static_cast<double>(g.node_count());
    std::vector<CascadeRunStats> out;
    out.reserve(grid.size());
    std::vector<double> fraction(trials);

    for (double p : grid) {
        parallel_for(trials, 64, [&](std::size_t b, std::size_t e) {
            std::vector<std::uint32_t> round(g.node_count(), CascadeTrace::kNever);
            std::vector<NodeId> frontier, next, touched;
            for (std::size_t t = b; t < e; ++t) {
                const CounterRng trial = root.split(t);
                const NodeId seed = static_cast<NodeId>(trial.split(0).below(0, g.node_count()));
                const std::size_t size =
                    run_cascade(g, std::span<const NodeId>(&seed, 1), p, trial.split(1), round, nullptr,
                                &touched, frontier, next);
                fraction[t] = static_cast<double>(size) / n;
                for (NodeId v : touched)
                    round[v] = CascadeTrace::kNever;
                touched.clear();
            }
        });
        double sum = 0.0;
        for (double f : fraction)
            sum += f;
        const double mean = sum / static_cast<double>(trials);
        double ss = 0.0;
        for (double f : fraction)
            ss += (f - mean) * (f - mean);
        const double se = trials > 1 ? std::sqrt(ss / static_cast<double>(trials - 1) / static_cast<double>(trials)) : 0.0;
        out.push_back({p, trials, mean, se, rng_seed});
    }
    return out;
}

} // namespace netdyn
