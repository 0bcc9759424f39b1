#pragma once

#include "netdyn/graph.hpp"

#include <Eigen/Dense>

#include <complex>
#include <optional>
#include <vector>

namespace netdyn {

/// Dominant eigenpair of the adjacency matrix from power iteration.
struct SpectralEstimate {
    double lambda1 = 0.0;   ///< spectral radius estimate
    WeightVector eigvec;    ///< left eigenvector, nonnegative, L1 = 1
    std::size_t iterations = 0;
    double residual = 0.0;  ///< || v A - lambda1 v ||_1
};

struct PowerIterationOptions {
    double tol = 1e-10;
    std::size_t max_iter = 10000;
    /// Iterations without a 10% improvement of the best residual before the
    /// run is declared stalled (equal-magnitude leading eigenvalues).
    std::size_t stall_window = 500;
};

/**
 * Power iteration for the dominant left eigenvector of A, starting from the
 * uniform vector. A graph whose iterates vanish (nilpotent A) returns
 * lambda1 = 0 with the last nonzero iterate. Throws NonConvergence, carrying
 * the best iterate, when the residual does not reach `tol`.
 */
SpectralEstimate power_iteration(const DirectedGraph& g, const PowerIterationOptions& opts = {});

/// Same iteration from a caller-supplied nonnegative start vector.
SpectralEstimate power_iteration_from(const DirectedGraph& g, std::span<const double> start,
                                      const PowerIterationOptions& opts = {});

inline constexpr std::size_t kDefaultDenseCap = 64;

/// All eigenvalues of A, sorted by descending magnitude, then by descending
/// real part, then by descending imaginary part.
std::vector<std::complex<double>> dense_eigenvalues(const DirectedGraph& g,
                                                    std::size_t dense_cap = kDefaultDenseCap);

/**
 * Full eigendecomposition A = X Lambda X^-1 = sum_i lambda_i Y_i with
 * Y_i = X Z_i X^-1, Z_i selecting the i-th diagonal entry.
 */
struct DenseSpectrum {
    std::vector<std::complex<double>> eigenvalues;
    std::vector<Eigen::MatrixXcd> projectors; ///< Y_i, aligned with eigenvalues

    /// sum_i lambda_i^power Y_i (power 1 reconstructs A).
    Eigen::MatrixXcd reconstruct(int power = 1) const;
};

/// Throws InvalidArgument above the cap and NumericalError("non-diagonalizable
/// within tolerance") when the eigenvector matrix is numerically singular.
DenseSpectrum dense_eigendecompose(const DirectedGraph& g, std::size_t dense_cap = kDefaultDenseCap);

/// Dense 0/1 adjacency matrix; test and oracle use only.
Eigen::MatrixXd dense_adjacency(const DirectedGraph& g);

/**
 * Spectral radius of A. Uses power iteration and, if that fails to converge,
 * the dense eigenvalues for graphs within the dense cap.
 */
struct SpectralRadius {
    double lambda1 = 0.0;
    double residual = 0.0;
    std::size_t iterations = 0;
    bool dense = false; ///< true when the dense fallback produced the value
};
SpectralRadius spectral_radius(const DirectedGraph& g, const PowerIterationOptions& opts = {},
                               std::size_t dense_cap = kDefaultDenseCap);

/// 1 / |lambda1|. Throws NumericalError for nilpotent (acyclic) graphs.
double epidemic_threshold(const DirectedGraph& g, const PowerIterationOptions& opts = {});

/// Horizon of a path sum; nullopt means t -> infinity.
using Horizon = std::optional<std::size_t>;

struct PathStats {
    double alpha = 0.0;
    Horizon horizon;
    double expected_paths = 0.0;  ///< ||S(alpha, t)||_1, sum of all entries
    /// sum_k (k + 1) alpha^k ||A^k||_1 / sum_k alpha^k ||A^k||_1: mean number
    /// of nodes on an attenuated walk. Equals 1 / (1 - alpha lambda1) on
    /// regular graphs at infinite horizon.
    double expected_length = 0.0;
    /// sum_k k alpha^k ||A^k||_1 / sum_k alpha^k ||A^k||_1 (= expected_length - 1).
    double mean_hops = 0.0;
    /// 1 / (1 - alpha lambda1) when alpha lambda1 < 1 and lambda1 is known.
    std::optional<double> closed_form_length;
    std::optional<double> lambda1;
    std::size_t terms = 0;        ///< series terms accumulated (k = 0 .. terms - 1)
};

struct PathStatsOptions {
    double rel_tol = 1e-12;          ///< infinite horizon stops when a term < rel_tol * sum
    std::size_t max_terms = 100000;
    PowerIterationOptions power;
};

/**
 * Path-count statistics of the attenuated series S(alpha, t) = sum_k (alpha A)^k,
 * accumulated term by term. Infinite horizons require alpha lambda1 < 1 and
 * throw NumericalError("supercritical: finite horizon required") otherwise.
 */
PathStats expected_path_stats(const DirectedGraph& g, double alpha, Horizon horizon,
                              const PathStatsOptions& opts = {});

} // namespace netdyn
