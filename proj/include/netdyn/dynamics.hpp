#pragma once

#include "netdyn/graph.hpp"
#include "netdyn/random.hpp"
#include "netdyn/spectral.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace netdyn {

enum class ProcessKind { Conservative, Nonconservative };

/**
 * Parameters of a linear process on the graph.
 *
 * Conservative: every step a node keeps (1 - alpha) of its initial weight and
 * passes alpha of its current weight through T = delta I + (1 - delta) D^-1 A.
 * Nonconservative: received weight is replicated through R = (delta / alpha) I + A
 * and attenuated by alpha per hop.
 */
struct ProcessConfig {
    ProcessKind kind = ProcessKind::Conservative;
    double alpha = 0.85;
    double delta = 0.0;
    DanglingPolicy dangling = DanglingPolicy::SelfRetain;

    /// Throws InvalidArgument when the parameters are outside their domain.
    void validate() const;

    static ProcessConfig conservative(double alpha, double delta = 0.0,
                                      DanglingPolicy dangling = DanglingPolicy::SelfRetain) {
        return {ProcessKind::Conservative, alpha, delta, dangling};
    }
    static ProcessConfig nonconservative(double alpha, double delta = 0.0) {
        return {ProcessKind::Nonconservative, alpha, delta, DanglingPolicy::SelfRetain};
    }
};

/// SIS matrix model: mu infects per contact per step, beta cures per step.
struct SisConfig {
    double mu = 0.1;
    double beta = 0.1;

    void validate() const;

    /// The nonconservative process whose per-step increment equals the SIS
    /// iterate: alpha = mu, R = ((1 - beta) / mu) I + A.
    ProcessConfig as_process() const { return ProcessConfig::nonconservative(mu, 1.0 - beta); }
};

struct SolverOptions {
    double tol = 1e-9;
    std::size_t max_iter = 10000;
};

/// x(t) = (1 - alpha) x0 + alpha x(t-1) T.
WeightVector conservative_step(const DirectedGraph& g, std::span<const double> x_prev,
                               std::span<const double> x0, const ProcessConfig& cfg);

/**
 * Fixed point (1 - alpha) x0 (I - alpha T)^-1 by iterating conservative_step.
 * Stops when the L1 change between iterates, and the geometric bound
 * alpha / (1 - alpha) times that change, are both within tol.
 */
WeightVector conservative_steady_state(const DirectedGraph& g, std::span<const double> x0,
                                       const ProcessConfig& cfg, const SolverOptions& opts = {});

/// Delta(t + 1) = alpha Delta(t) R.
WeightVector nonconservative_step(const DirectedGraph& g, std::span<const double> delta_prev,
                                  const ProcessConfig& cfg);

/**
 * x(t) = sum_{k=0..t} x0 (alpha R)^k. An infinite horizon needs
 * alpha lambda1(R) = delta + alpha lambda1(A) < 1 and sums terms until the
 * geometric tail bound drops below opts.tol.
 */
WeightVector nonconservative_accumulate(const DirectedGraph& g, std::span<const double> x0,
                                        const ProcessConfig& cfg, Horizon horizon,
                                        const SolverOptions& opts = {});

/// P(t) = P(t-1) ((1 - beta) I + mu A). Scores are not clamped to [0, 1].
WeightVector sis_step(const DirectedGraph& g, std::span<const double> p_prev, const SisConfig& cfg);

/// Outcome of one independent-cascade run.
struct CascadeTrace {
    static constexpr std::uint32_t kNever = UINT32_MAX;

    std::vector<std::uint32_t> round;  ///< infection round per node, kNever if untouched
    std::vector<NodeId> parent;        ///< infecting node; seeds are their own parent
    std::vector<NodeId> order;         ///< infected nodes by (round, id)

    std::size_t size() const noexcept { return order.size(); }
};

/**
 * Synchronous-round independent cascade: every node infected in round r tries
 * each out-neighbor once in round r + 1, succeeding with probability
 * `transmissibility`. Edge trials are drawn from `rng` by edge index, so the
 * infected set is the live-edge reachable set and grows monotonically with
 * transmissibility for a fixed stream.
 */
CascadeTrace simulate_cascade(const DirectedGraph& g, std::span<const NodeId> seeds,
                              double transmissibility, const CounterRng& rng);

/// Infected node set, ascending.
std::vector<NodeId> independent_cascade(const DirectedGraph& g, std::span<const NodeId> seeds,
                                        double transmissibility, std::uint64_t rng_seed);

struct CascadeRunStats {
    double transmissibility = 0.0;
    std::size_t trials = 0;
    double mean_outbreak_fraction = 0.0;
    double stderr_fraction = 0.0;
    std::uint64_t rng_seed = 0;
};

/**
 * Mean outbreak fraction per grid point; each trial seeds one uniformly drawn
 * node. Trial i uses stream split(i) of `rng_seed` at every grid point, so the
 * curve is monotone in transmissibility and independent of the thread count.
 */
std::vector<CascadeRunStats> threshold_sweep(const DirectedGraph& g, std::span<const double> grid,
                                             std::size_t trials, std::uint64_t rng_seed);

} // namespace netdyn
