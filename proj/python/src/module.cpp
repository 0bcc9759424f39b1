#include "netdyn/centrality.hpp"
#include "netdyn/dynamics.hpp"
#include "netdyn/empirics.hpp"
#include "netdyn/error.hpp"
#include "netdyn/io.hpp"
#include "netdyn/parallel.hpp"
#include "netdyn/spectral.hpp"

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

namespace py = pybind11;
using namespace netdyn;

namespace {

py::array_t<double> to_array(const WeightVector& v) { return py::array_t<double>(v.size(), v.data()); }

DirectedGraph graph_from_pairs(const std::vector<std::pair<NodeId, NodeId>>& pairs, std::size_t node_count) {
    std::vector<Edge> edges;
    edges.reserve(pairs.size());
    for (auto [u, v] : pairs)
        edges.push_back({u, v});
    return build_graph(edges, node_count);
}

std::optional<WeightVector> maybe(const std::optional<std::vector<double>>& v) {
    if (!v)
        return std::nullopt;
    return WeightVector(v->begin(), v->end());
}

py::dict centrality_dict(const CentralityScores& s) {
    py::dict d;
    d["measure"] = std::string(to_string(s.measure));
    d["alpha"] = s.alpha ? py::cast(*s.alpha) : py::none();
    d["values"] = to_array(s.values);
    d["starting_vector"] = s.starting_vector;
    return d;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Conservative and non-conservative network dynamics";

    static py::exception<Error> error(m, "Error", PyExc_RuntimeError);
    static py::exception<InvalidArgument> invalid(m, "InvalidArgument", error.ptr());
    static py::exception<InputFormatError> input(m, "InputFormatError", error.ptr());
    static py::exception<NumericalError> numerical(m, "NumericalError", error.ptr());
    static py::exception<NonConvergence> nonconv(m, "NonConvergence", numerical.ptr());
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p)
                std::rethrow_exception(p);
        } catch (const NonConvergence& e) {
            py::set_error(nonconv, e.what());
        } catch (const NumericalError& e) {
            py::set_error(numerical, e.what());
        } catch (const InputFormatError& e) {
            py::set_error(input, e.what());
        } catch (const InvalidArgument& e) {
            py::set_error(invalid, e.what());
        } catch (const Error& e) {
            py::set_error(error, e.what());
        }
    });

    m.def("set_thread_count", &set_thread_count, py::arg("threads"), "0 uses every hardware thread.");
    m.def("thread_count", &thread_count);

    py::class_<DirectedGraph>(m, "Graph")
        .def(py::init(&graph_from_pairs), py::arg("edges"), py::arg("node_count") = 0,
             "Directed graph from (src, dst) pairs; duplicates and self-loops are dropped.")
        .def_property_readonly("node_count", &DirectedGraph::node_count)
        .def_property_readonly("edge_count", &DirectedGraph::edge_count)
        .def("out_degree", &DirectedGraph::out_degree)
        .def("in_degree", &DirectedGraph::in_degree)
        .def("has_edge", &DirectedGraph::has_edge)
        .def("out_neighbors",
             [](const DirectedGraph& g, NodeId u) {
                 auto s = g.out_neighbors(u);
                 return std::vector<NodeId>(s.begin(), s.end());
             })
        .def("in_neighbors",
             [](const DirectedGraph& g, NodeId v) {
                 auto s = g.in_neighbors(v);
                 return std::vector<NodeId>(s.begin(), s.end());
             })
        .def("edges",
             [](const DirectedGraph& g) {
                 std::vector<std::pair<NodeId, NodeId>> out;
                 for (auto e : g.edges())
                     out.emplace_back(e.src, e.dst);
                 return out;
             })
        .def("transposed", &DirectedGraph::transposed)
        .def("__repr__", [](const DirectedGraph& g) {
            return "Graph(nodes=" + std::to_string(g.node_count()) + ", edges=" + std::to_string(g.edge_count()) + ")";
        });

    m.def(
        "read_edge_list",
        [](const std::string& path) {
            auto loaded = read_edge_list_file(path);
            py::object labels = py::none();
            if (!loaded.labels.integer_mode())
                labels = py::cast(loaded.labels.labels());
            return py::make_tuple(std::move(loaded.graph), labels);
        },
        py::arg("path"), "Returns (graph, labels); labels is None for integer node ids.");

    // spectral
    py::class_<SpectralRadius>(m, "SpectralRadius")
        .def_readonly("lambda1", &SpectralRadius::lambda1)
        .def_readonly("residual", &SpectralRadius::residual)
        .def_readonly("iterations", &SpectralRadius::iterations)
        .def_readonly("dense", &SpectralRadius::dense);
    m.def(
        "spectral_radius", [](const DirectedGraph& g, std::size_t dense_cap) {
            return spectral_radius(g, {}, dense_cap);
        },
        py::arg("graph"), py::arg("dense_cap") = kDefaultDenseCap);
    m.def("epidemic_threshold", [](const DirectedGraph& g) { return epidemic_threshold(g); }, py::arg("graph"));
    m.def(
        "expected_path_stats",
        [](const DirectedGraph& g, double alpha, std::optional<std::size_t> horizon) {
            const auto s = expected_path_stats(g, alpha, horizon);
            py::dict d;
            d["alpha"] = s.alpha;
            d["expected_paths"] = s.expected_paths;
            d["expected_length"] = s.expected_length;
            d["mean_hops"] = s.mean_hops;
            d["closed_form_length"] = s.closed_form_length ? py::cast(*s.closed_form_length) : py::none();
            d["lambda1"] = s.lambda1 ? py::cast(*s.lambda1) : py::none();
            d["terms"] = s.terms;
            return d;
        },
        py::arg("graph"), py::arg("alpha"), py::arg("horizon") = py::none());

    // dynamics
    auto conservative = [](double alpha, double delta, const std::string& dangling) {
        return ProcessConfig::conservative(alpha, delta, parse_dangling_policy(dangling));
    };
    m.def(
        "conservative_step",
        [=](const DirectedGraph& g, const std::vector<double>& x, const std::vector<double>& x0, double alpha,
            double delta, const std::string& dangling) {
            return to_array(conservative_step(g, x, x0, conservative(alpha, delta, dangling)));
        },
        py::arg("graph"), py::arg("x"), py::arg("x0"), py::arg("alpha"), py::arg("delta") = 0.0,
        py::arg("dangling") = "self-retain");
    m.def(
        "conservative_steady_state",
        [=](const DirectedGraph& g, const std::vector<double>& x0, double alpha, double delta,
            const std::string& dangling) {
            return to_array(conservative_steady_state(g, x0, conservative(alpha, delta, dangling)));
        },
        py::arg("graph"), py::arg("x0"), py::arg("alpha"), py::arg("delta") = 0.0,
        py::arg("dangling") = "self-retain");
    m.def(
        "nonconservative_step",
        [](const DirectedGraph& g, const std::vector<double>& d, double alpha, double delta) {
            return to_array(nonconservative_step(g, d, ProcessConfig::nonconservative(alpha, delta)));
        },
        py::arg("graph"), py::arg("delta_prev"), py::arg("alpha"), py::arg("delta") = 0.0);
    m.def(
        "nonconservative_accumulate",
        [](const DirectedGraph& g, const std::vector<double>& x0, double alpha, double delta,
           std::optional<std::size_t> horizon) {
            return to_array(nonconservative_accumulate(g, x0, ProcessConfig::nonconservative(alpha, delta), horizon));
        },
        py::arg("graph"), py::arg("x0"), py::arg("alpha"), py::arg("delta") = 0.0, py::arg("horizon") = py::none());
    m.def(
        "sis_step",
        [](const DirectedGraph& g, const std::vector<double>& p, double mu, double beta) {
            return to_array(sis_step(g, p, SisConfig{mu, beta}));
        },
        py::arg("graph"), py::arg("p"), py::arg("mu"), py::arg("beta"));
    m.def(
        "independent_cascade",
        [](const DirectedGraph& g, const std::vector<NodeId>& seeds, double p, std::uint64_t seed) {
            return independent_cascade(g, seeds, p, seed);
        },
        py::arg("graph"), py::arg("seeds"), py::arg("transmissibility"), py::arg("seed"));
    m.def(
        "threshold_sweep",
        [](const DirectedGraph& g, const std::vector<double>& grid, std::size_t trials, std::uint64_t seed) {
            py::list out;
            for (const auto& r : threshold_sweep(g, grid, trials, seed)) {
                py::dict d;
                d["transmissibility"] = r.transmissibility;
                d["mean_fraction"] = r.mean_outbreak_fraction;
                d["stderr"] = r.stderr_fraction;
                out.append(d);
            }
            return out;
        },
        py::arg("graph"), py::arg("grid"), py::arg("trials"), py::arg("seed"));

    // centrality
    m.def(
        "pagerank",
        [](const DirectedGraph& g, double alpha, std::optional<std::vector<double>> s) {
            return centrality_dict(pagerank(g, alpha, maybe(s)));
        },
        py::arg("graph"), py::arg("alpha") = 0.85, py::arg("s") = py::none());
    m.def(
        "alpha_centrality",
        [](const DirectedGraph& g, double alpha, std::optional<std::vector<double>> s) {
            return centrality_dict(alpha_centrality(g, alpha, maybe(s)));
        },
        py::arg("graph"), py::arg("alpha"), py::arg("s") = py::none());
    m.def(
        "normalized_alpha_centrality",
        [](const DirectedGraph& g, double alpha, std::optional<std::vector<double>> s) {
            return centrality_dict(normalized_alpha_centrality(g, alpha, maybe(s)));
        },
        py::arg("graph"), py::arg("alpha"), py::arg("s") = py::none());
    m.def(
        "eigenvector_centrality", [](const DirectedGraph& g) { return centrality_dict(eigenvector_centrality(g)); },
        py::arg("graph"));
    m.def(
        "centrality",
        [](const DirectedGraph& g, const std::string& measure, double alpha) {
            return centrality_dict(compute_centrality(g, parse_measure(measure), alpha));
        },
        py::arg("graph"), py::arg("measure"), py::arg("alpha") = 0.85);
    m.def(
        "rank", [](const std::vector<double>& values) { return rank(values).order; }, py::arg("values"),
        "Node ids by descending score, ties by ascending id.");

    // empirics
    m.def("hypergeometric_pmf", &hypergeometric_pmf, py::arg("k"), py::arg("K"), py::arg("N"), py::arg("n"));
    m.def("hypergeometric_upper_tail", &hypergeometric_upper_tail, py::arg("k"), py::arg("K"), py::arg("N"),
          py::arg("n"));

    py::class_<EventLog>(m, "EventLog")
        .def_property_readonly("item_count", [](const EventLog& log) { return log.items().size(); })
        .def_property_readonly("mode", [](const EventLog& log) { return std::string(to_string(log.mode())); })
        .def("item_ids",
             [](const EventLog& log) {
                 std::vector<std::string> ids;
                 for (const auto& it : log.items())
                     ids.push_back(it.id);
                 return ids;
             })
        .def("active_user_count", &EventLog::active_user_count)
        .def("to_csv", [](const EventLog& log) {
            std::ostringstream out;
            write_event_log(out, log);
            return out.str();
        });
    m.def(
        "read_event_log",
        [](const std::string& path, const std::string& mode) { return read_event_log_file(path, parse_log_mode(mode)); },
        py::arg("path"), py::arg("mode") = "digg");
    m.def(
        "extract_cascade", [](const EventLog& log, const DirectedGraph& g, const std::string& item) {
            const auto c = extract_cascade(log, g, item);
            return py::make_tuple(c.members, c.edges);
        },
        py::arg("log"), py::arg("graph"), py::arg("item_id"), "Returns (members, parent-child edges).");
    m.def(
        "estimate_influence",
        [](const EventLog& log, const DirectedGraph& g, std::size_t window, std::size_t min_items,
           std::size_t min_item_rebroadcasts) {
            py::list out;
            for (const auto& e : estimate_influence(log, g, {window, min_items, min_item_rebroadcasts})) {
                py::dict d;
                d["user"] = e.user;
                d["n_items"] = e.n_items;
                d["followers"] = e.followers;
                d["local"] = e.local;
                d["global"] = e.global;
                out.append(d);
            }
            return out;
        },
        py::arg("log"), py::arg("graph"), py::arg("window") = 100, py::arg("min_items") = 2,
        py::arg("min_item_rebroadcasts") = 100);
    m.def(
        "spam_filter", [](const EventLog& log, double threshold) { return spam_filter(log, threshold); },
        py::arg("log"), py::arg("threshold") = 3.0);
    m.def(
        "pearson_correlation",
        [](const std::vector<double>& x, const std::vector<double>& y) { return pearson_correlation(x, y); },
        py::arg("x"), py::arg("y"));
    m.def(
        "correlation_sweep",
        [](const DirectedGraph& g, const EventLog& log, const std::vector<std::string>& measures,
           const std::vector<double>& alphas, const std::string& influence, std::size_t window, std::size_t min_items,
           std::size_t min_item_rebroadcasts, double p_cut) {
            std::vector<Measure> ms;
            for (const auto& name : measures)
                ms.push_back(parse_measure(name));
            CorrelationOptions opts;
            opts.influence = {window, min_items, min_item_rebroadcasts};
            opts.p_cut = p_cut;
            const auto report = correlation_sweep(g, log, ms, alphas, parse_influence_kind(influence), opts);
            py::list rows;
            for (const auto& r : report.rows) {
                py::dict d;
                d["alpha"] = r.alpha;
                d["measure"] = std::string(to_string(r.measure));
                d["influence"] = std::string(to_string(r.influence));
                d["pearson_r"] = r.pearson_r;
                d["cohort_size"] = r.cohort_size;
                rows.append(d);
            }
            return py::make_tuple(report.cohort, rows);
        },
        py::arg("graph"), py::arg("log"), py::arg("measures"), py::arg("alphas"), py::arg("influence") = "local",
        py::arg("window") = 100, py::arg("min_items") = 2, py::arg("min_item_rebroadcasts") = 100,
        py::arg("p_cut") = 0.05, "Returns (cohort, rows).");
}
