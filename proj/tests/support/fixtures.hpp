#pragma once

// Test fixtures and dense reference computations. Everything here works from
// the raw edge list with Eigen, never through the library's sparse products.

#include "netdyn/graph.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <numeric>
#include <random>
#include <set>
#include <vector>

namespace fixtures {

using netdyn::DanglingPolicy;
using netdyn::Edge;
using netdyn::NodeId;

struct Fixture {
    std::size_t n = 0;
    std::vector<Edge> edges; // deduplicated, no self-loops
    netdyn::DirectedGraph graph;
};

inline Fixture make(std::size_t n, std::vector<Edge> edges) {
    Fixture f;
    f.n = n;
    std::set<Edge> uniq;
    for (auto e : edges)
        if (e.src != e.dst)
            uniq.insert(e);
    f.edges.assign(uniq.begin(), uniq.end());
    f.graph = netdyn::build_graph(f.edges, n);
    return f;
}

inline Fixture chain(std::size_t n) {
    std::vector<Edge> e;
    for (NodeId i = 0; i + 1 < n; ++i)
        e.push_back({i, i + 1});
    return make(n, e);
}

inline Fixture cycle(std::size_t n) {
    std::vector<Edge> e;
    for (NodeId i = 0; i < n; ++i)
        e.push_back({i, static_cast<NodeId>((i + 1) % n)});
    return make(n, e);
}

inline Fixture complete(std::size_t n) {
    std::vector<Edge> e;
    for (NodeId i = 0; i < n; ++i)
        for (NodeId j = 0; j < n; ++j)
            if (i != j)
                e.push_back({i, j});
    return make(n, e);
}

/// Hub 0 pointing at 1..leaves.
inline Fixture out_star(std::size_t leaves) {
    std::vector<Edge> e;
    for (NodeId i = 1; i <= leaves; ++i)
        e.push_back({0, i});
    return make(leaves + 1, e);
}

/// Erdos-Renyi G(n, p) digraph. With strongly_connected a random Hamiltonian
/// cycle is added on top.
inline Fixture random_graph(std::size_t n, double p, std::uint64_t seed, bool strongly_connected = true) {
    std::mt19937_64 rng(seed);
    std::bernoulli_distribution coin(p);
    std::vector<Edge> e;
    for (NodeId i = 0; i < n; ++i)
        for (NodeId j = 0; j < n; ++j)
            if (i != j && coin(rng))
                e.push_back({i, j});
    if (strongly_connected) {
        std::vector<NodeId> perm(n);
        std::iota(perm.begin(), perm.end(), NodeId{0});
        std::shuffle(perm.begin(), perm.end(), rng);
        for (std::size_t k = 0; k < n; ++k)
            e.push_back({perm[k], perm[(k + 1) % n]});
    }
    return make(n, e);
}

/// Random graph with some nodes lacking out-edges.
inline Fixture random_with_dangling(std::size_t n, double p, std::size_t dangling, std::uint64_t seed) {
    auto base = random_graph(n, p, seed, false);
    std::vector<Edge> e;
    for (auto edge : base.edges)
        if (edge.src >= dangling)
            e.push_back(edge);
    return make(n, e);
}

inline Eigen::MatrixXd adjacency(const Fixture& f) {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(f.n, f.n);
    for (auto e : f.edges)
        a(e.src, e.dst) = 1.0;
    return a;
}

inline Eigen::MatrixXd transfer(const Fixture& f, double delta, DanglingPolicy policy) {
    const Eigen::MatrixXd a = adjacency(f);
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(f.n, f.n);
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        const double deg = a.row(i).sum();
        if (deg > 0)
            w.row(i) = a.row(i) / deg;
        else if (policy == DanglingPolicy::UniformTeleport)
            w.row(i).setConstant(1.0 / static_cast<double>(f.n));
        else
            w(i, i) = 1.0;
    }
    return delta * Eigen::MatrixXd::Identity(f.n, f.n) + (1.0 - delta) * w;
}

inline Eigen::MatrixXd replication(const Fixture& f, double delta, double alpha) {
    Eigen::MatrixXd r = adjacency(f);
    if (delta != 0.0)
        r += (delta / alpha) * Eigen::MatrixXd::Identity(f.n, f.n);
    return r;
}

inline Eigen::RowVectorXd row(const std::vector<double>& v) {
    return Eigen::Map<const Eigen::RowVectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

inline std::vector<double> vec(const Eigen::RowVectorXd& v) { return {v.data(), v.data() + v.size()}; }

/// (1 - alpha) x0 (I - alpha T)^-1
inline std::vector<double> dense_conservative_steady(const Fixture& f, const std::vector<double>& x0, double alpha,
                                                     double delta, DanglingPolicy policy) {
    const Eigen::MatrixXd m = Eigen::MatrixXd::Identity(f.n, f.n) - alpha * transfer(f, delta, policy);
    const Eigen::RowVectorXd x = (1.0 - alpha) * row(x0);
    return vec(m.transpose().fullPivLu().solve(x.transpose()).transpose());
}

/// x0 (I - alpha R)^-1
inline std::vector<double> dense_nonconservative_steady(const Fixture& f, const std::vector<double>& x0,
                                                        double alpha, double delta) {
    const Eigen::MatrixXd m = Eigen::MatrixXd::Identity(f.n, f.n) - alpha * replication(f, delta, alpha);
    return vec(m.transpose().fullPivLu().solve(row(x0).transpose()).transpose());
}

inline double dense_spectral_radius(const Fixture& f) {
    Eigen::EigenSolver<Eigen::MatrixXd> es(adjacency(f), false);
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

/// Dominant left eigenvector (L1-normalized, nonnegative) from the dense solver.
inline std::vector<double> dense_perron_left(const Fixture& f) {
    Eigen::EigenSolver<Eigen::MatrixXd> es(adjacency(f).transpose(), true);
    Eigen::Index best = 0;
    es.eigenvalues().cwiseAbs().maxCoeff(&best);
    Eigen::VectorXd v = es.eigenvectors().col(best).real();
    if (v.sum() < 0)
        v = -v;
    v /= v.sum();
    return {v.data(), v.data() + v.size()};
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

inline std::vector<double> random_vector(std::size_t n, std::uint64_t seed, double lo = 0.0, double hi = 1.0) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(lo, hi);
    std::vector<double> v(n);
    for (auto& x : v)
        x = u(rng);
    return v;
}

} // namespace fixtures
