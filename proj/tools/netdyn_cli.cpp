// netdyn command-line front end.
//
// Exit codes: 0 success, 2 usage, 3 input format, 4 numerical failure.
// Errors are reported on stderr as one JSON object per line.

#include "netdyn/centrality.hpp"
#include "netdyn/dynamics.hpp"
#include "netdyn/empirics.hpp"
#include "netdyn/error.hpp"
#include "netdyn/graph.hpp"
#include "netdyn/io.hpp"
#include "netdyn/parallel.hpp"
#include "netdyn/spectral.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

using namespace netdyn;
using ojson = nlohmann::ordered_json;

namespace {

enum class Format { Csv, Json };

struct Common {
    std::uint64_t seed = 1;
    unsigned threads = 1;
    std::string format = "csv";
    std::string output;
    std::string edges;
    std::string mapping_out;

    Format fmt() const { return format == "json" ? Format::Json : Format::Csv; }
};

class UsageError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

ojson number(double v) {
    if (!std::isfinite(v))
        return nullptr;
    return std::stod(format_number(v));
}

/// "lo:hi:step" -> lo + i step for i = 0, 1, ... while <= hi.
std::vector<double> parse_grid(const std::string& spec) {
    std::vector<double> parts;
    std::stringstream ss(spec);
    std::string tok;
    while (std::getline(ss, tok, ':')) {
        try {
            std::size_t used = 0;
            parts.push_back(std::stod(tok, &used));
            if (used != tok.size())
                throw std::invalid_argument(tok);
        } catch (const std::exception&) {
            throw UsageError("grid '" + spec + "': '" + tok + "' is not a number");
        }
    }
    if (parts.size() != 3)
        throw UsageError("grid '" + spec + "' must have the form lo:hi:step");
    const double lo = parts[0], hi = parts[1], step = parts[2];
    if (!(step > 0.0) || !(lo <= hi) || !std::isfinite(hi))
        throw UsageError("grid '" + spec + "' needs lo <= hi and step > 0");
    const auto count = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
    std::vector<double> grid(count);
    for (std::size_t i = 0; i < count; ++i)
        grid[i] = lo + static_cast<double>(i) * step;
    return grid;
}

LoadedGraph load_graph(const Common& c) {
    auto loaded = read_edge_list_file(c.edges);
    if (!loaded.labels.integer_mode()) {
        const std::string path = c.mapping_out.empty() ? c.edges + ".map.tsv" : c.mapping_out;
        std::ofstream map(path);
        if (!map)
            throw UsageError("cannot write label mapping to '" + path + "'");
        write_label_mapping(map, loaded.labels);
    }
    return loaded;
}

void emit(const Common& c, const std::string& text) {
    if (c.output.empty()) {
        std::cout << text;
        std::cout.flush();
        return;
    }
    std::ofstream out(c.output, std::ios::binary);
    if (!out)
        throw UsageError("cannot write output to '" + c.output + "'");
    out << text;
}

NodeId resolve_node(const NodeLabels& labels, const std::string& label, std::size_t n) {
    auto id = labels.find(label);
    if (!id || *id >= n)
        throw UsageError("unknown node '" + label + "'");
    return *id;
}

// ---------------------------------------------------------------------------

struct SpectralArgs {
    std::size_t dense_cap = kDefaultDenseCap;
};

std::string run_spectral(const Common& c, const SpectralArgs& a) {
    const auto loaded = load_graph(c);
    const auto est = spectral_radius(loaded.graph, {}, a.dense_cap);
    ojson j;
    j["nodes"] = loaded.graph.node_count();
    j["edges"] = loaded.graph.edge_count();
    j["lambda1"] = number(est.lambda1);
    j["residual"] = number(est.residual);
    j["iterations"] = est.iterations;
    j["method"] = est.dense ? "dense" : "power-iteration";
    try {
        j["threshold"] = number(epidemic_threshold(loaded.graph));
        j["threshold_error"] = nullptr;
    } catch (const NumericalError& e) {
        j["threshold"] = nullptr;
        j["threshold_error"] = e.what();
    }
    if (c.fmt() == Format::Csv) {
        std::ostringstream out;
        out << "lambda1,threshold,residual,iterations,method\n"
            << format_number(est.lambda1) << ','
            << (j["threshold"].is_null() ? "" : format_number(j["threshold"].get<double>())) << ','
            << format_number(est.residual) << ',' << est.iterations << ',' << j["method"].get<std::string>() << '\n';
        return out.str();
    }
    return j.dump(2) + "\n";
}

// ---------------------------------------------------------------------------

struct CentralityArgs {
    std::string measure = "pagerank";
    double alpha = 0.85;
    std::string sweep;
};

std::string run_centrality(const Common& c, const CentralityArgs& a) {
    const Measure measure = parse_measure(a.measure);
    const auto loaded = load_graph(c);
    const auto& g = loaded.graph;
    const std::vector<double> alphas = a.sweep.empty() ? std::vector<double>{a.alpha} : parse_grid(a.sweep);
    const bool with_alpha = !a.sweep.empty();

    std::ostringstream out;
    ojson runs = ojson::array();
    if (c.fmt() == Format::Csv)
        out << (with_alpha ? "alpha,node,score,rank\n" : "node,score,rank\n");
    for (double alpha : alphas) {
        const auto scores = compute_centrality(g, measure, alpha);
        const auto r = rank(scores);
        if (c.fmt() == Format::Csv) {
            for (NodeId v = 0; v < g.node_count(); ++v) {
                if (with_alpha)
                    out << format_number(alpha) << ',';
                out << loaded.labels.label(v) << ',' << format_number(scores.values[v]) << ',' << r.rank[v] << '\n';
            }
        } else {
            ojson nodes = ojson::array();
            for (NodeId v = 0; v < g.node_count(); ++v)
                nodes.push_back({{"node", loaded.labels.label(v)}, {"score", number(scores.values[v])},
                                 {"rank", r.rank[v]}});
            ojson run;
            run["alpha"] = scores.alpha ? number(*scores.alpha) : ojson(nullptr);
            run["starting_vector"] = scores.starting_vector;
            run["nodes"] = std::move(nodes);
            runs.push_back(std::move(run));
        }
    }
    if (c.fmt() == Format::Json) {
        ojson j;
        j["measure"] = to_string(measure);
        j["tie_policy"] = Ranking::tie_policy;
        j["runs"] = std::move(runs);
        return j.dump(2) + "\n";
    }
    return out.str();
}

// ---------------------------------------------------------------------------

struct SimulateArgs {
    std::string process = "conservative";
    double alpha = 0.85;
    double delta = 0.0;
    double mu = 0.1;
    double beta = 0.2;
    std::string dangling = "self-retain";
    std::string steps = "10";
    std::string initial = "uniform";
    std::string report = "vectors";
};

WeightVector initial_vector(const LoadedGraph& loaded, const std::string& spec) {
    const std::size_t n = loaded.graph.node_count();
    if (spec == "uniform")
        return WeightVector(n, 1.0 / static_cast<double>(n));
    if (spec == "indegree")
        return indegree_vector(loaded.graph);
    if (spec.rfind("node:", 0) == 0) {
        WeightVector x(n, 0.0);
        x[resolve_node(loaded.labels, spec.substr(5), n)] = 1.0;
        return x;
    }
    throw UsageError("--initial must be uniform, indegree or node:<label>");
}

std::string run_simulate(const Common& c, const SimulateArgs& a) {
    const auto loaded = load_graph(c);
    const auto& g = loaded.graph;
    const WeightVector x0 = initial_vector(loaded, a.initial);

    Horizon horizon;
    if (a.steps != "inf") {
        try {
            horizon = static_cast<std::size_t>(std::stoull(a.steps));
        } catch (const std::exception&) {
            throw UsageError("--steps must be a non-negative integer or 'inf'");
        }
    }

    // (step label, vector) pairs in output order
    std::vector<std::pair<std::string, WeightVector>> states;
    if (a.process == "conservative") {
        const auto cfg = ProcessConfig::conservative(a.alpha, a.delta, parse_dangling_policy(a.dangling));
        cfg.validate();
        if (!horizon) {
            states.emplace_back("inf", conservative_steady_state(g, x0, cfg));
        } else {
            WeightVector x = x0;
            states.emplace_back("0", x);
            for (std::size_t t = 1; t <= *horizon; ++t) {
                x = conservative_step(g, x, x0, cfg);
                states.emplace_back(std::to_string(t), x);
            }
        }
    } else if (a.process == "nonconservative") {
        const auto cfg = ProcessConfig::nonconservative(a.alpha, a.delta);
        cfg.validate();
        if (!horizon) {
            states.emplace_back("inf", nonconservative_accumulate(g, x0, cfg, std::nullopt));
        } else {
            WeightVector x = x0, d = x0;
            states.emplace_back("0", x);
            for (std::size_t t = 1; t <= *horizon; ++t) {
                d = nonconservative_step(g, d, cfg);
                for (std::size_t i = 0; i < x.size(); ++i)
                    x[i] += d[i];
                states.emplace_back(std::to_string(t), x);
            }
        }
    } else if (a.process == "sis") {
        const SisConfig cfg{a.mu, a.beta};
        cfg.validate();
        if (!horizon)
            throw UsageError("sis needs a finite --steps");
        WeightVector p = x0;
        states.emplace_back("0", p);
        for (std::size_t t = 1; t <= *horizon; ++t) {
            p = sis_step(g, p, cfg);
            states.emplace_back(std::to_string(t), p);
        }
    } else {
        throw UsageError("--process must be conservative, nonconservative or sis");
    }

    const bool norms = a.report == "norms";
    if (!norms && a.report != "vectors")
        throw UsageError("--report must be vectors or norms");

    if (c.fmt() == Format::Json) {
        ojson rows = ojson::array();
        for (const auto& [step, x] : states) {
            ojson row;
            if (step == "inf")
                row["step"] = step;
            else
                row["step"] = std::stoull(step);
            if (norms) {
                row["l1_norm"] = number(l1_norm(x));
            } else {
                ojson values = ojson::array();
                for (double v : x)
                    values.push_back(number(v));
                row["values"] = std::move(values);
            }
            rows.push_back(std::move(row));
        }
        ojson j;
        j["process"] = a.process;
        j["nodes"] = ojson::array();
        for (NodeId v = 0; v < g.node_count(); ++v)
            j["nodes"].push_back(loaded.labels.label(v));
        j["states"] = std::move(rows);
        return j.dump(2) + "\n";
    }

    std::ostringstream out;
    out << (norms ? "step,l1_norm\n" : "step,node,value\n");
    for (const auto& [step, x] : states) {
        if (norms) {
            out << step << ',' << format_number(l1_norm(x)) << '\n';
            continue;
        }
        for (NodeId v = 0; v < g.node_count(); ++v)
            out << step << ',' << loaded.labels.label(v) << ',' << format_number(x[v]) << '\n';
    }
    return out.str();
}

// ---------------------------------------------------------------------------

struct ThresholdArgs {
    std::size_t trials = 10000;
    std::string grid;
    std::string relative_grid = "0.25:3:0.25";
};

std::string run_threshold(const Common& c, const ThresholdArgs& a) {
    const auto loaded = load_graph(c);
    const auto& g = loaded.graph;
    std::vector<double> grid;
    std::optional<double> lambda1;
    if (!a.grid.empty()) {
        grid = parse_grid(a.grid);
    } else {
        lambda1 = spectral_radius(g).lambda1;
        const double threshold = epidemic_threshold(g);
        for (double r : parse_grid(a.relative_grid))
            if (r * threshold <= 1.0)
                grid.push_back(r * threshold);
    }
    const auto stats = threshold_sweep(g, grid, a.trials, c.seed);

    if (c.fmt() == Format::Json) {
        ojson points = ojson::array();
        for (const auto& s : stats)
            points.push_back({{"transmissibility", number(s.transmissibility)},
                              {"mean_fraction", number(s.mean_outbreak_fraction)},
                              {"stderr", number(s.stderr_fraction)}});
        ojson j;
        j["trials"] = a.trials;
        j["seed"] = c.seed;
        j["lambda1"] = lambda1 ? number(*lambda1) : ojson(nullptr);
        j["points"] = std::move(points);
        return j.dump(2) + "\n";
    }
    std::ostringstream out;
    out << "transmissibility,mean_fraction,stderr\n";
    for (const auto& s : stats)
        out << format_number(s.transmissibility) << ',' << format_number(s.mean_outbreak_fraction) << ','
            << format_number(s.stderr_fraction) << '\n';
    return out.str();
}

// ---------------------------------------------------------------------------

struct EmpiricsArgs {
    std::string events;
    std::string mode = "digg";
    std::size_t window = 100;
    std::size_t min_items = 2;
    std::size_t min_rebroadcasts = 100;
    double p_cut = 0.05;
    std::int64_t active_users = 0;
    double entropy_threshold = 3.0;
    bool spam_filter = false;
};

EventLog load_log(const EmpiricsArgs& a, const NodeLabels& labels) {
    return read_event_log_file(a.events, parse_log_mode(a.mode), labels);
}

std::string run_influence(const Common& c, const EmpiricsArgs& a) {
    const auto loaded = load_graph(c);
    const auto& g = loaded.graph;
    const auto log = load_log(a, loaded.labels);
    const auto estimates = estimate_influence(log, g, {a.window, a.min_items, a.min_rebroadcasts});
    const std::int64_t N = a.active_users > 0 ? a.active_users : static_cast<std::int64_t>(g.node_count());
    const std::int64_t n = std::min<std::int64_t>(static_cast<std::int64_t>(a.window), N);
    // a cut above every probability keeps all users and fills in their p-values
    const auto rows = significance_screen(estimates, g, N, n, 2.0);

    if (c.fmt() == Format::Json) {
        ojson users = ojson::array();
        for (const auto& e : rows)
            users.push_back({{"user", log.labels().label(e.user)}, {"n_items", e.n_items},
                             {"followers", e.followers}, {"local", number(e.local)}, {"global", number(e.global)},
                             {"significance_p", number(e.significance_p)},
                             {"significant", e.significance_p < a.p_cut}});
        ojson j;
        j["window"] = a.window;
        j["active_users"] = N;
        j["p_cut"] = number(a.p_cut);
        j["users"] = std::move(users);
        return j.dump(2) + "\n";
    }
    std::ostringstream out;
    out << "user,n_items,followers,local,global,significance_p\n";
    for (const auto& e : rows)
        out << log.labels().label(e.user) << ',' << e.n_items << ',' << e.followers << ',' << format_number(e.local)
            << ',' << format_number(e.global) << ',' << format_number(e.significance_p) << '\n';
    return out.str();
}

struct CorrelateArgs {
    std::string measures = "nalpha,pagerank";
    std::string sweep = "0:0.95:0.05";
    std::string influence = "local";
};

std::string run_correlate(const Common& c, const EmpiricsArgs& e, const CorrelateArgs& a) {
    std::vector<Measure> measures;
    std::stringstream ss(a.measures);
    std::string tok;
    while (std::getline(ss, tok, ','))
        measures.push_back(parse_measure(tok));
    if (measures.empty())
        throw UsageError("--measures is empty");
    const auto grid = parse_grid(a.sweep);
    const auto kind = parse_influence_kind(a.influence);

    const auto loaded = load_graph(c);
    const auto log = load_log(e, loaded.labels);
    CorrelationOptions opts;
    opts.influence = {e.window, e.min_items, e.min_rebroadcasts};
    opts.apply_spam_filter = e.spam_filter;
    opts.entropy_threshold = e.entropy_threshold;
    opts.p_cut = e.p_cut;
    opts.active_users = e.active_users;
    const auto report = correlation_sweep(loaded.graph, log, measures, grid, kind, opts);

    std::ostringstream out;
    if (c.fmt() == Format::Json)
        write_correlation_json(out, report, log.labels());
    else
        write_correlation_csv(out, report);
    return out.str();
}

// ---------------------------------------------------------------------------

int fail(int code, std::string_view kind, const std::string& message) {
    ojson j;
    j["error"] = kind;
    j["message"] = message;
    std::cerr << j.dump() << '\n';
    return code;
}

void add_common(CLI::App* sub, Common& c) {
    sub->add_option("edges", c.edges, "Edge list (src<TAB>dst per line)")->required()->check(CLI::ExistingFile);
    sub->add_option("--seed", c.seed, "Random seed");
    sub->add_option("--threads", c.threads, "Worker threads (0 = all cores)");
    sub->add_option("--format", c.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("-o,--output", c.output, "Write output to this file instead of stdout");
    sub->add_option("--mapping-out", c.mapping_out, "Label mapping sidecar path (default <edges>.map.tsv)");
}

void add_empirics(CLI::App* sub, EmpiricsArgs& e) {
    sub->add_option("--events", e.events, "Activity log CSV")->required()->check(CLI::ExistingFile);
    sub->add_option("--mode", e.mode, "Log semantics")->check(CLI::IsMember({"digg", "twitter"}));
    sub->add_option("--window", e.window, "Rebroadcasts counted for local influence");
    sub->add_option("--min-items", e.min_items, "Qualifying items a submitter needs");
    sub->add_option("--min-rebroadcasts", e.min_rebroadcasts, "Rebroadcasts an item needs to qualify");
    sub->add_option("--p-cut", e.p_cut, "Significance cut (>= 1 disables the screen)");
    sub->add_option("--active-users", e.active_users, "Population size N of the urn test (default: node count)");
    sub->add_option("--entropy-threshold", e.entropy_threshold, "Entropy (bits) above which items count as spam");
    sub->add_flag("--spam-filter", e.spam_filter, "Drop high-entropy items first");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Network dynamics, centrality and influence analysis"};
    app.require_subcommand(1);
    app.option_defaults()->always_capture_default();

    Common common;
    SpectralArgs spectral_args;
    CentralityArgs centrality_args;
    SimulateArgs simulate_args;
    ThresholdArgs threshold_args;
    EmpiricsArgs empirics_args;
    CorrelateArgs correlate_args;

    auto* spectral = app.add_subcommand("spectral", "Spectral radius and epidemic threshold");
    add_common(spectral, common);
    spectral->get_option("--format")->default_str("json");
    spectral->add_option("--dense-cap", spectral_args.dense_cap, "Largest graph for the dense fallback");

    auto* centrality = app.add_subcommand("centrality", "Centrality scores and ranks");
    add_common(centrality, common);
    centrality->add_option("--measure", centrality_args.measure, "pagerank|alpha|nalpha|eigenvector|indegree|outdegree");
    centrality->add_option("--alpha", centrality_args.alpha, "Attenuation or damping factor");
    centrality->add_option("--alpha-sweep", centrality_args.sweep, "lo:hi:step grid of alpha values");

    auto* simulate = app.add_subcommand("simulate", "Process trajectories");
    add_common(simulate, common);
    simulate->add_option("--process", simulate_args.process, "conservative|nonconservative|sis");
    simulate->add_option("--alpha", simulate_args.alpha, "Transfer or attenuation factor");
    simulate->add_option("--delta", simulate_args.delta, "Self-retention parameter");
    simulate->add_option("--mu", simulate_args.mu, "SIS infection rate");
    simulate->add_option("--beta", simulate_args.beta, "SIS curing rate");
    simulate->add_option("--dangling", simulate_args.dangling, "self-retain|uniform-teleport");
    simulate->add_option("--steps", simulate_args.steps, "Number of steps, or 'inf' for the steady state");
    simulate->add_option("--initial", simulate_args.initial, "uniform|indegree|node:<label>");
    simulate->add_option("--report", simulate_args.report, "vectors|norms");

    auto* threshold = app.add_subcommand("threshold", "Independent-cascade outbreak sweep");
    add_common(threshold, common);
    threshold->add_option("--trials", threshold_args.trials, "Trials per grid point");
    threshold->add_option("--grid", threshold_args.grid, "lo:hi:step of transmissibilities");
    threshold->add_option("--relative-grid", threshold_args.relative_grid, "lo:hi:step in units of 1/lambda1; points above 1 are dropped");

    auto* influence = app.add_subcommand("influence", "Local and global influence of submitters");
    add_common(influence, common);
    add_empirics(influence, empirics_args);

    auto* correlate = app.add_subcommand("correlate", "Correlate centrality with empirical influence");
    add_common(correlate, common);
    add_empirics(correlate, empirics_args);
    correlate->add_option("--measures", correlate_args.measures, "Comma-separated measures");
    correlate->add_option("--alpha-sweep", correlate_args.sweep, "lo:hi:step grid of alpha values");
    correlate->add_option("--influence", correlate_args.influence, "local|global");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return fail(2, "usage", e.what());
    }

    try {
        set_thread_count(common.threads);
        std::string text;
        if (spectral->parsed()) {
            if (spectral->count("--format") == 0)
                common.format = "json";
            text = run_spectral(common, spectral_args);
        } else if (centrality->parsed()) {
            text = run_centrality(common, centrality_args);
        } else if (simulate->parsed()) {
            text = run_simulate(common, simulate_args);
        } else if (threshold->parsed()) {
            text = run_threshold(common, threshold_args);
        } else if (influence->parsed()) {
            text = run_influence(common, empirics_args);
        } else if (correlate->parsed()) {
            text = run_correlate(common, empirics_args, correlate_args);
        }
        emit(common, text);
        return 0;
    } catch (const UsageError& e) {
        return fail(2, "usage", e.what());
    } catch (const Error& e) {
        switch (e.kind()) {
        case ErrorKind::InvalidArgument: return fail(2, "invalid_argument", e.what());
        case ErrorKind::InputFormat: return fail(3, "input_format", e.what());
        case ErrorKind::Numerical: return fail(4, "numerical", e.what());
        }
        return fail(1, "internal", e.what());
    } catch (const std::exception& e) {
        return fail(1, "internal", e.what());
    }
}
