#include "netdyn/spectral.hpp"

#include "netdyn/error.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace netdyn {

SpectralEstimate power_iteration(const DirectedGraph& g, const PowerIterationOptions& opts) {
    if (g.node_count() == 0)
        throw InvalidArgument("power_iteration: empty graph");
    const WeightVector uniform(g.node_count(), 1.0 / static_cast<double>(g.node_count()));
    return power_iteration_from(g, uniform, opts);
}

SpectralEstimate power_iteration_from(const DirectedGraph& g, std::span<const double> start,
                                      const PowerIterationOptions& opts) {
    check_size(g, start, "power_iteration");
    if (!(opts.tol > 0.0))
        throw InvalidArgument("power_iteration: tol must be positive");
    for (double s : start)
        if (!(s >= 0.0) || !std::isfinite(s))
            throw InvalidArgument("power_iteration: start vector must be finite and nonnegative");
    const double norm0 = l1_norm(start);
    if (norm0 == 0.0)
        throw InvalidArgument("power_iteration: start vector is zero");

    WeightVector v(start.begin(), start.end());
    for (double& x : v)
        x /= norm0;

    WeightVector best = v;
    double best_lambda = 0.0;
    double best_residual = std::numeric_limits<double>::infinity();
    std::size_t last_improvement = 0;

    for (std::size_t it = 1; it <= opts.max_iter; ++it) {
        WeightVector w = adjacency_apply(g, v);
        const double lambda = l1_norm(w);
        if (lambda == 0.0)
            return {0.0, std::move(v), it, 0.0};

        double residual = 0.0;
        for (std::size_t i = 0; i < v.size(); ++i)
            residual += std::abs(w[i] - lambda * v[i]);

        if (residual < best_residual) {
            if (residual < 0.9 * best_residual)
                last_improvement = it;
            best_residual = residual;
            best = v;
            best_lambda = lambda;
        }
        if (residual <= opts.tol)
            return {lambda, std::move(v), it, residual};
        if (it - last_improvement > opts.stall_window) {
            std::ostringstream msg;
            msg << "power iteration stalled after " << it << " iterations (residual " << best_residual
                << "); leading eigenvalues likely share a magnitude, use the dense solver";
            throw NonConvergence(msg.str(), std::move(best), best_lambda, best_residual, it);
        }
        for (std::size_t i = 0; i < v.size(); ++i)
            v[i] = w[i] / lambda;
    }
    std::ostringstream msg;
    msg << "power iteration did not converge in " << opts.max_iter << " iterations (residual "
        << best_residual << ")";
    throw NonConvergence(msg.str(), std::move(best), best_lambda, best_residual, opts.max_iter);
}

Eigen::MatrixXd dense_adjacency(const DirectedGraph& g) {
    const auto n = static_cast<Eigen::Index>(g.node_count());
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
    for (const auto& e : g.edges())
        a(e.src, e.dst) = 1.0;
    return a;
}

namespace {

void check_cap(const DirectedGraph& g, std::size_t cap) {
    if (g.node_count() == 0)
        throw InvalidArgument("dense eigensolver: empty graph");
    if (g.node_count() > cap)
        throw InvalidArgument("dense eigensolver: " + std::to_string(g.node_count()) +
                              " nodes exceeds the dense cap of " + std::to_string(cap));
}

bool magnitude_order(const std::complex<double>& a, const std::complex<double>& b) {
    const double ma = std::abs(a), mb = std::abs(b);
    // Magnitudes that differ only by rounding count as ties.
    if (std::abs(ma - mb) > 1e-12 * std::max(1.0, std::max(ma, mb)))
        return ma > mb;
    if (a.real() != b.real())
        return a.real() > b.real();
    return a.imag() > b.imag();
}

std::vector<std::size_t> sorted_order(const Eigen::VectorXcd& values) {
    std::vector<std::size_t> order(static_cast<std::size_t>(values.size()));
    for (std::size_t i = 0; i < order.size(); ++i)
        order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return magnitude_order(values(static_cast<Eigen::Index>(a)), values(static_cast<Eigen::Index>(b)));
    });
    return order;
}

} // namespace

std::vector<std::complex<double>> dense_eigenvalues(const DirectedGraph& g, std::size_t dense_cap) {
    check_cap(g, dense_cap);
    Eigen::EigenSolver<Eigen::MatrixXd> solver(dense_adjacency(g), false);
    if (solver.info() != Eigen::Success)
        throw NumericalError("dense eigensolver failed to converge");
    const Eigen::VectorXcd values = solver.eigenvalues();
    std::vector<std::complex<double>> out;
    for (std::size_t i : sorted_order(values))
        out.push_back(values(static_cast<Eigen::Index>(i)));
    return out;
}

Eigen::MatrixXcd DenseSpectrum::reconstruct(int power) const {
    if (projectors.empty())
        return {};
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(projectors.front().rows(), projectors.front().cols());
    for (std::size_t i = 0; i < projectors.size(); ++i)
        out += std::pow(eigenvalues[i], power) * projectors[i];
    return out;
}

DenseSpectrum dense_eigendecompose(const DirectedGraph& g, std::size_t dense_cap) {
    check_cap(g, dense_cap);
    const Eigen::MatrixXd a = dense_adjacency(g);
    Eigen::EigenSolver<Eigen::MatrixXd> solver(a, true);
    if (solver.info() != Eigen::Success)
        throw NumericalError("dense eigensolver failed to converge");

    const Eigen::MatrixXcd x = solver.eigenvectors();
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(x);
    const auto& sv = svd.singularValues();
    if (sv(sv.size() - 1) <= 1e-10 * sv(0))
        throw NumericalError("non-diagonalizable within tolerance");
    const Eigen::MatrixXcd x_inv = x.inverse();

    const Eigen::VectorXcd values = solver.eigenvalues();
    DenseSpectrum out;
    for (std::size_t i : sorted_order(values)) {
        const auto k = static_cast<Eigen::Index>(i);
        out.eigenvalues.push_back(values(k));
        out.projectors.push_back(x.col(k) * x_inv.row(k));
    }
    const double err = (out.reconstruct(1) - a.cast<std::complex<double>>()).cwiseAbs().maxCoeff();
    if (err > 1e-8)
        throw NumericalError("non-diagonalizable within tolerance");
    return out;
}

SpectralRadius spectral_radius(const DirectedGraph& g, const PowerIterationOptions& opts,
                               std::size_t dense_cap) {
    try {
        const auto est = power_iteration(g, opts);
        return {est.lambda1, est.residual, est.iterations, false};
    } catch (const NonConvergence&) {
        if (g.node_count() > dense_cap)
            throw;
    }
    const auto values = dense_eigenvalues(g, dense_cap);
    return {std::abs(values.front()), 0.0, 0, true};
}

double epidemic_threshold(const DirectedGraph& g, const PowerIterationOptions& opts) {
    const auto radius = spectral_radius(g, opts);
    if (radius.lambda1 <= 1e-12)
        throw NumericalError("no finite threshold (nilpotent adjacency)");
    return 1.0 / radius.lambda1;
}

PathStats expected_path_stats(const DirectedGraph& g, double alpha, Horizon horizon,
                              const PathStatsOptions& opts) {
    if (!(alpha >= 0.0) || !std::isfinite(alpha))
        throw InvalidArgument("expected_path_stats: alpha must be finite and nonnegative");
    if (g.node_count() == 0)
        throw InvalidArgument("expected_path_stats: empty graph");

    PathStats stats;
    stats.alpha = alpha;
    stats.horizon = horizon;

    if (!horizon) {
        stats.lambda1 = spectral_radius(g, opts.power).lambda1;
    } else {
        try {
            stats.lambda1 = spectral_radius(g, opts.power).lambda1;
        } catch (const NumericalError&) {
            // finite horizons do not need lambda1
        }
    }
    if (stats.lambda1) {
        const double rho = alpha * *stats.lambda1;
        if (!horizon && rho >= 1.0)
            throw NumericalError(rho == 1.0 ? "critical: alpha * lambda1 = 1, series diverges"
                                            : "supercritical: finite horizon required");
        if (rho < 1.0)
            stats.closed_form_length = 1.0 / (1.0 - rho);
    }

    // Terms are alpha^k ||e A^k||_1. Sums are kept relative to exp(log_scale)
    // so long supercritical horizons do not overflow the ratios.
    constexpr double kRescaleAt = 1e200;
    WeightVector v(g.node_count(), 1.0);
    double sum = static_cast<double>(g.node_count());
    double weighted = 0.0;
    double log_scale = 0.0;
    std::size_t k = 0;
    const std::size_t last = horizon.value_or(opts.max_terms);
    while (k < last) {
        WeightVector w = adjacency_apply(g, v);
        for (double& x : w)
            x *= alpha;
        const double term = l1_norm(w);
        if (term == 0.0)
            break;
        ++k;
        sum += term;
        weighted += static_cast<double>(k) * term;
        v = std::move(w);
        if (term > kRescaleAt) {
            for (double& x : v)
                x /= kRescaleAt;
            sum /= kRescaleAt;
            weighted /= kRescaleAt;
            log_scale += std::log(kRescaleAt);
        }
        if (!horizon && term < opts.rel_tol * sum)
            break;
        if (!horizon && k == opts.max_terms)
            throw NumericalError("path series did not settle within " + std::to_string(opts.max_terms) +
                                 " terms");
    }
    stats.terms = k + 1;
    stats.expected_paths = log_scale == 0.0 ? sum : sum * std::exp(log_scale);
    stats.mean_hops = weighted / sum;
    stats.expected_length = 1.0 + stats.mean_hops;
    return stats;
}

} // namespace netdyn
