#include "netdyn/empirics.hpp"

#include "netdyn/dynamics.hpp"
#include "netdyn/error.hpp"
#include "netdyn/random.hpp"

#include <json.hpp>

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <unordered_map>

namespace netdyn {

std::string_view to_string(LogMode mode) { return mode == LogMode::Digg ? "digg" : "twitter"; }

LogMode parse_log_mode(std::string_view name) {
    if (name == "digg")
        return LogMode::Digg;
    if (name == "twitter")
        return LogMode::Twitter;
    throw InvalidArgument("unknown log mode '" + std::string(name) + "'");
}

std::string_view to_string(InfluenceKind kind) { return kind == InfluenceKind::Local ? "local" : "global"; }

InfluenceKind parse_influence_kind(std::string_view name) {
    if (name == "local")
        return InfluenceKind::Local;
    if (name == "global")
        return InfluenceKind::Global;
    throw InvalidArgument("unknown influence kind '" + std::string(name) + "'");
}

namespace {

std::optional<std::int64_t> parse_int(std::string_view s) {
    std::int64_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || ptr != s.data() + s.size())
        return std::nullopt;
    return v;
}

} // namespace

bool item_id_less(std::string_view a, std::string_view b) {
    const auto ia = parse_int(a), ib = parse_int(b);
    if (ia && ib)
        return *ia != *ib ? *ia < *ib : a < b;
    if (ia.has_value() != ib.has_value())
        return ia.has_value();
    return a < b;
}

// ---------------------------------------------------------------------------
// Event log

EventLog EventLog::from_records(std::span<const EventRecord> records, LogMode mode, NodeLabels labels,
                                const std::string& source) {
    EventLog log;
    log.mode_ = mode;
    log.labels_ = std::move(labels);

    std::unordered_map<std::string, std::size_t> slot;
    std::vector<std::set<NodeId>> voters;
    for (const auto& r : records) {
        auto [it, fresh] = slot.emplace(r.item_id, log.items_.size());
        if (fresh) {
            if (mode == LogMode::Digg && r.kind != EventKind::Submit)
                throw InputFormatError(source, r.line, "item '" + r.item_id + "' must start with its submit row");
            log.items_.push_back({r.item_id, {r.user, r.timestamp}, {}});
            voters.push_back({r.user});
            continue;
        }
        Item& item = log.items_[it->second];
        if (r.kind == EventKind::Submit)
            throw InputFormatError(source, r.line, "item '" + r.item_id + "' has more than one submit row");
        if (r.timestamp < item.submit.timestamp)
            throw InputFormatError(source, r.line, "rebroadcast of item '" + r.item_id + "' precedes its submission");
        if (mode == LogMode::Digg && !voters[it->second].insert(r.user).second)
            throw InputFormatError(source, r.line,
                                   "user " + log.labels_.label(r.user) + " votes on item '" + r.item_id + "' twice");
        item.rebroadcasts.push_back({r.user, r.timestamp});
    }

    for (auto& item : log.items_)
        std::stable_sort(item.rebroadcasts.begin(), item.rebroadcasts.end(), [](const Event& a, const Event& b) {
            return a.timestamp != b.timestamp ? a.timestamp < b.timestamp : a.user < b.user;
        });
    std::sort(log.items_.begin(), log.items_.end(),
              [](const Item& a, const Item& b) { return item_id_less(a.id, b.id); });
    return log;
}

const Item& EventLog::item(std::string_view id) const {
    auto it = std::lower_bound(items_.begin(), items_.end(), id,
                               [](const Item& a, std::string_view b) { return item_id_less(a.id, b); });
    if (it == items_.end() || it->id != id)
        throw InvalidArgument("unknown item '" + std::string(id) + "'");
    return *it;
}

bool EventLog::contains(std::string_view id) const {
    auto it = std::lower_bound(items_.begin(), items_.end(), id,
                               [](const Item& a, std::string_view b) { return item_id_less(a.id, b); });
    return it != items_.end() && it->id == id;
}

EventLog EventLog::subset(std::span<const std::string> ids) const {
    EventLog out;
    out.mode_ = mode_;
    out.labels_ = labels_;
    std::set<std::string> keep(ids.begin(), ids.end());
    for (const auto& item : items_)
        if (keep.count(item.id))
            out.items_.push_back(item);
    return out;
}

std::size_t EventLog::active_user_count() const {
    std::set<NodeId> users;
    for (const auto& item : items_) {
        users.insert(item.submit.user);
        for (const auto& e : item.rebroadcasts)
            users.insert(e.user);
    }
    return users.size();
}

std::vector<EventRecord> EventLog::records() const {
    std::vector<EventRecord> out;
    for (const auto& item : items_) {
        out.push_back({item.id, item.submit.user, item.submit.timestamp, EventKind::Submit, 0});
        for (const auto& e : item.rebroadcasts)
            out.push_back({item.id, e.user, e.timestamp, EventKind::Rebroadcast, 0});
    }
    return out;
}

EventLog read_event_log(std::istream& in, LogMode mode, NodeLabels labels, const std::string& source) {
    std::string line;
    std::size_t lineno = 0;
    auto strip = [](std::string& s) {
        while (!s.empty() && (s.back() == '\r' || s.back() == ' '))
            s.pop_back();
    };
    if (!std::getline(in, line))
        throw InputFormatError(source, 1, "missing header");
    ++lineno;
    strip(line);
    if (line != "item_id,user_id,timestamp,kind")
        throw InputFormatError(source, lineno, "expected header 'item_id,user_id,timestamp,kind'");

    std::vector<EventRecord> records;
    while (std::getline(in, line)) {
        ++lineno;
        strip(line);
        if (line.empty())
            continue;
        std::vector<std::string_view> f;
        std::string_view rest = line;
        for (std::size_t comma; (comma = rest.find(',')) != std::string_view::npos;) {
            f.push_back(rest.substr(0, comma));
            rest.remove_prefix(comma + 1);
        }
        f.push_back(rest);
        if (f.size() != 4 || f[0].empty() || f[1].empty())
            throw InputFormatError(source, lineno, "expected 4 fields 'item_id,user_id,timestamp,kind'");

        EventRecord r;
        r.item_id = std::string(f[0]);
        r.line = lineno;
        try {
            r.user = labels.intern(f[1]);
        } catch (const InvalidArgument& e) {
            throw InputFormatError(source, lineno, e.what());
        }
        const auto ts = parse_int(f[2]);
        if (!ts)
            throw InputFormatError(source, lineno, "timestamp must be integer epoch seconds");
        r.timestamp = *ts;
        if (f[3] == "submit")
            r.kind = EventKind::Submit;
        else if (f[3] == "rebroadcast")
            r.kind = EventKind::Rebroadcast;
        else
            throw InputFormatError(source, lineno, "kind must be 'submit' or 'rebroadcast'");
        records.push_back(std::move(r));
    }
    return EventLog::from_records(records, mode, std::move(labels), source);
}

EventLog read_event_log_file(const std::string& path, LogMode mode, NodeLabels labels) {
    std::ifstream in(path);
    if (!in)
        throw InputFormatError(path, 0, "cannot open file");
    return read_event_log(in, mode, std::move(labels), path);
}

void write_event_log(std::ostream& out, const EventLog& log) {
    out << "item_id,user_id,timestamp,kind\n";
    for (const auto& r : log.records())
        out << r.item_id << ',' << log.labels().label(r.user) << ',' << r.timestamp << ','
            << (r.kind == EventKind::Submit ? "submit" : "rebroadcast") << '\n';
}

// ---------------------------------------------------------------------------
// Cascades and influence

namespace {

void require_known_users(const EventLog& log, const DirectedGraph& g) {
    std::set<NodeId> missing;
    for (const auto& item : log.items()) {
        if (item.submit.user >= g.node_count())
            missing.insert(item.submit.user);
        for (const auto& e : item.rebroadcasts)
            if (e.user >= g.node_count())
                missing.insert(e.user);
    }
    if (missing.empty())
        return;
    std::string list;
    for (NodeId u : missing)
        list += (list.empty() ? "" : ", ") + log.labels().label(u);
    throw InvalidArgument("users not in the follower graph: " + list);
}

Cascade extract(const Item& item, const DirectedGraph& g, std::vector<char>& member) {
    Cascade c;
    c.item_id = item.id;
    c.members.push_back(item.submit.user);
    member[item.submit.user] = 1;
    for (const auto& e : item.rebroadcasts) {
        if (member[e.user])
            continue;
        const std::size_t before = c.edges.size();
        for (NodeId followed : g.out_neighbors(e.user))
            if (member[followed])
                c.edges.emplace_back(followed, e.user);
        if (c.edges.size() > before) {
            member[e.user] = 1;
            c.members.push_back(e.user);
        }
    }
    for (NodeId u : c.members)
        member[u] = 0;
    return c;
}

} // namespace

Cascade extract_cascade(const EventLog& log, const DirectedGraph& g, std::string_view item_id) {
    const Item& item = log.item(item_id);
    require_known_users(log.subset(std::vector<std::string>{item.id}), g);
    std::vector<char> member(g.node_count(), 0);
    return extract(item, g, member);
}

std::vector<InfluenceEstimate> estimate_influence(const EventLog& log, const DirectedGraph& g,
                                                  const InfluenceOptions& opts) {
    require_known_users(log, g);
    std::map<NodeId, std::vector<const Item*>> by_submitter;
    for (const auto& item : log.items())
        if (item.rebroadcasts.size() >= opts.min_item_rebroadcasts)
            by_submitter[item.submit.user].push_back(&item);

    std::vector<char> member(g.node_count(), 0);
    std::vector<InfluenceEstimate> out;
    for (const auto& [user, items] : by_submitter) {
        if (items.size() < std::max<std::size_t>(opts.min_items, 1))
            continue;
        double local = 0.0, global = 0.0;
        for (const Item* item : items) {
            const std::size_t upto = std::min(opts.window, item->rebroadcasts.size());
            std::size_t hits = 0;
            for (std::size_t i = 0; i < upto; ++i)
                if (g.has_edge(item->rebroadcasts[i].user, user))
                    ++hits;
            local += static_cast<double>(hits);
            global += static_cast<double>(extract(*item, g, member).size());
        }
        const double m = static_cast<double>(items.size());
        out.push_back({user, items.size(), g.in_degree(user), local / m, global / m, 1.0});
    }
    return out;
}

std::vector<InfluenceEstimate> local_influence(const EventLog& log, const DirectedGraph& g,
                                               const InfluenceOptions& opts) {
    return estimate_influence(log, g, opts);
}

std::vector<InfluenceEstimate> global_influence(const EventLog& log, const DirectedGraph& g,
                                                const InfluenceOptions& opts) {
    return estimate_influence(log, g, opts);
}

// ---------------------------------------------------------------------------
// Urn model

namespace {

// lgamma differences lose ~1e-10 to cancellation once a reaches 10^5, so short
// products are summed directly.
double log_choose(std::int64_t a, std::int64_t b) {
    const std::int64_t m = std::min(b, a - b);
    if (m <= 1000) {
        double sum = 0.0;
        for (std::int64_t i = 1; i <= m; ++i)
            sum += std::log(static_cast<double>(a - m + i) / static_cast<double>(i));
        return sum;
    }
    return std::lgamma(static_cast<double>(a) + 1.0) - std::lgamma(static_cast<double>(b) + 1.0) -
           std::lgamma(static_cast<double>(a - b) + 1.0);
}

void check_urn(std::int64_t K, std::int64_t N, std::int64_t n) {
    if (K < 0 || N < 0 || n < 0 || K > N || n > N)
        throw InvalidArgument("hypergeometric: need 0 <= K <= N and 0 <= n <= N (K=" + std::to_string(K) +
                              ", N=" + std::to_string(N) + ", n=" + std::to_string(n) + ")");
}

double pmf_unchecked(std::int64_t k, std::int64_t K, std::int64_t N, std::int64_t n) {
    if (k < n - (N - K))
        return 0.0;
    return std::exp(log_choose(K, k) + log_choose(N - K, n - k) - log_choose(N, n));
}

} // namespace

double hypergeometric_pmf(std::int64_t k, std::int64_t K, std::int64_t N, std::int64_t n) {
    check_urn(K, N, n);
    if (k < 0 || k > std::min(K, n))
        throw InvalidArgument("hypergeometric: k must lie in [0, min(K, n)]");
    return pmf_unchecked(k, K, N, n);
}

double hypergeometric_upper_tail(std::int64_t k, std::int64_t K, std::int64_t N, std::int64_t n) {
    check_urn(K, N, n);
    const std::int64_t lo = std::max<std::int64_t>(0, n - (N - K));
    const std::int64_t hi = std::min(K, n);
    if (k <= lo)
        return 1.0;
    if (k > hi)
        return 0.0;
    double tail = 0.0;
    for (std::int64_t j = hi; j >= k; --j) // small terms first
        tail += pmf_unchecked(j, K, N, n);
    return std::min(tail, 1.0);
}

std::vector<InfluenceEstimate> significance_screen(std::span<const InfluenceEstimate> estimates,
                                                   const DirectedGraph& g, std::int64_t N, std::int64_t n,
                                                   double p_cut) {
    std::vector<InfluenceEstimate> kept;
    for (auto est : estimates) {
        if (est.user >= g.node_count())
            throw InvalidArgument("significance_screen: user " + std::to_string(est.user) + " not in graph");
        const auto K = static_cast<std::int64_t>(g.in_degree(est.user));
        const auto k = static_cast<std::int64_t>(std::ceil(est.local - 1e-9));
        est.followers = static_cast<std::size_t>(K);
        est.significance_p = hypergeometric_upper_tail(k, K, N, n);
        if (est.significance_p < p_cut)
            kept.push_back(est);
    }
    return kept;
}

// ---------------------------------------------------------------------------
// Activity entropies

unsigned interval_bin(std::int64_t seconds) {
    if (seconds < 0)
        throw InvalidArgument("interval_bin: negative interval");
    return static_cast<unsigned>(std::bit_width(static_cast<std::uint64_t>(seconds) + 1) - 1);
}

namespace {

template <class Map> double entropy_bits(const Map& counts, double total) {
    double h = 0.0;
    for (const auto& [key, c] : counts) {
        const double p = static_cast<double>(c) / total;
        h -= p * std::log2(p);
    }
    return h == 0.0 ? 0.0 : h;
}

} // namespace

ActivityEntropy activity_entropies(const EventLog& log, std::string_view item_id) {
    const Item& item = log.item(item_id);
    const auto& ev = item.rebroadcasts;
    if (ev.size() < 2)
        throw InvalidArgument("undefined entropy: item '" + item.id + "' has fewer than two rebroadcasts");
    std::map<NodeId, std::size_t> users;
    for (const auto& e : ev)
        ++users[e.user];
    std::map<unsigned, std::size_t> bins;
    for (std::size_t i = 1; i < ev.size(); ++i)
        ++bins[interval_bin(ev[i].timestamp - ev[i - 1].timestamp)];
    return {entropy_bits(users, static_cast<double>(ev.size())),
            entropy_bits(bins, static_cast<double>(ev.size() - 1))};
}

std::vector<std::string> spam_filter(const EventLog& log, double threshold) {
    std::vector<std::string> kept;
    for (const auto& item : log.items()) {
        if (item.rebroadcasts.size() < 2)
            continue;
        const auto h = activity_entropies(log, item.id);
        if (h.user_bits > threshold && h.interval_bits > threshold)
            kept.push_back(item.id);
    }
    return kept;
}

// ---------------------------------------------------------------------------
// Correlation

double pearson_correlation(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size())
        throw InvalidArgument("pearson_correlation: length mismatch");
    if (x.size() < 3)
        throw InvalidArgument("pearson_correlation: need at least 3 observations");
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0, x2 = 0.0, y2 = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mx, dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
        x2 += x[i] * x[i];
        y2 += y[i] * y[i];
    }
    // Spread at rounding level of the values counts as no spread.
    if (sxx <= 1e-24 * x2 || syy <= 1e-24 * y2)
        throw InvalidArgument("degenerate cohort: zero variance");
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

CorrelationReport correlation_sweep(const DirectedGraph& g, const EventLog& log, std::span<const Measure> measures,
                                    std::span<const double> alpha_grid, InfluenceKind influence,
                                    const CorrelationOptions& opts) {
    const EventLog screened =
        opts.apply_spam_filter ? log.subset(spam_filter(log, opts.entropy_threshold)) : log;
    auto estimates = estimate_influence(screened, g, opts.influence);
    if (opts.p_cut < 1.0) {
        const std::int64_t N =
            opts.active_users > 0 ? opts.active_users : static_cast<std::int64_t>(g.node_count());
        const auto n = std::min<std::int64_t>(static_cast<std::int64_t>(opts.influence.window), N);
        estimates = significance_screen(estimates, g, N, n, opts.p_cut);
    }
    if (estimates.size() < 3)
        throw InvalidArgument("cohort too small: " + std::to_string(estimates.size()) +
                              " users after screening, need at least 3");

    CorrelationReport report;
    report.alphas.assign(alpha_grid.begin(), alpha_grid.end());
    std::vector<double> target;
    for (const auto& e : estimates) {
        report.cohort.push_back(e.user);
        target.push_back(influence == InfluenceKind::Local ? e.local : e.global);
    }
    // Surfaces the degenerate-cohort error before any centrality work.
    pearson_correlation(target, target);

    auto correlate = [&](const WeightVector& scores) {
        std::vector<double> x;
        x.reserve(report.cohort.size());
        for (NodeId u : report.cohort)
            x.push_back(scores[u]);
        try {
            return pearson_correlation(x, target);
        } catch (const InvalidArgument&) {
            return std::nan("");
        }
    };

    std::map<Measure, double> alpha_free;
    for (double alpha : alpha_grid) {
        for (Measure m : measures) {
            double r;
            const bool depends_on_alpha =
                m == Measure::PageRank || m == Measure::Alpha || m == Measure::NormalizedAlpha;
            if (!depends_on_alpha && alpha_free.count(m)) {
                r = alpha_free[m];
            } else {
                try {
                    r = correlate(compute_centrality(g, m, alpha, opts.centrality).values);
                } catch (const NumericalError&) {
                    r = std::nan("");
                } catch (const InvalidArgument&) {
                    r = std::nan("");
                }
                if (!depends_on_alpha)
                    alpha_free[m] = r;
            }
            report.rows.push_back({alpha, m, influence, r, report.cohort.size()});
        }
    }
    return report;
}

void write_correlation_csv(std::ostream& out, const CorrelationReport& report) {
    out << "alpha,measure,influence_kind,pearson_r,cohort_size\n";
    for (const auto& r : report.rows)
        out << format_number(r.alpha) << ',' << to_string(r.measure) << ',' << to_string(r.influence) << ','
            << format_number(r.pearson_r) << ',' << r.cohort_size << '\n';
}

namespace {

nlohmann::ordered_json json_number(double v) {
    if (!std::isfinite(v))
        return nullptr;
    return std::stod(format_number(v));
}

} // namespace

void write_correlation_json(std::ostream& out, const CorrelationReport& report, const NodeLabels& labels) {
    nlohmann::ordered_json j;
    j["alphas"] = nlohmann::ordered_json::array();
    for (double a : report.alphas)
        j["alphas"].push_back(json_number(a));
    j["cohort"] = nlohmann::ordered_json::array();
    for (NodeId u : report.cohort)
        j["cohort"].push_back(labels.label(u));
    j["rows"] = nlohmann::ordered_json::array();
    for (const auto& r : report.rows)
        j["rows"].push_back({{"alpha", json_number(r.alpha)},
                             {"measure", to_string(r.measure)},
                             {"influence_kind", to_string(r.influence)},
                             {"pearson_r", json_number(r.pearson_r)},
                             {"cohort_size", r.cohort_size}});
    out << j.dump(2) << '\n';
}

// ---------------------------------------------------------------------------
// Synthetic logs

SynthesizedLog synthesize_event_log(const DirectedGraph& g, const SynthesisOptions& opts) {
    if (opts.submitters.empty())
        throw InvalidArgument("synthesize_event_log: no submitters");
    if (opts.round_seconds < 2)
        throw InvalidArgument("synthesize_event_log: round_seconds must be at least 2");
    const DirectedGraph broadcast = g.transposed();
    const CounterRng root(opts.seed);
    const std::size_t total = opts.submitters.size() * opts.items_per_submitter;

    std::vector<EventRecord> records;
    SynthesizedLog out;
    for (std::size_t i = 0; i < total; ++i) {
        const NodeId submitter = opts.submitters[i % opts.submitters.size()];
        const CounterRng stream = root.split(i);
        const auto trace = simulate_cascade(broadcast, std::span<const NodeId>(&submitter, 1),
                                            opts.transmissibility, stream.split(0));
        const std::string id = std::to_string(i + 1);
        const std::int64_t base = opts.start_time + static_cast<std::int64_t>(i) * opts.item_spacing;
        records.push_back({id, submitter, base, EventKind::Submit, 0});
        const CounterRng jitter = stream.split(1);
        for (NodeId v : trace.order) {
            if (v == submitter)
                continue;
            const auto r = static_cast<std::int64_t>(trace.round[v]);
            const auto offset = static_cast<std::int64_t>(jitter.below(v, static_cast<std::uint64_t>(opts.round_seconds - 1)));
            records.push_back({id, v, base + (r - 1) * opts.round_seconds + 1 + offset, EventKind::Rebroadcast, 0});
        }
        auto infected = trace.order;
        std::sort(infected.begin(), infected.end());
        out.infected.push_back(std::move(infected));
    }
    out.log = EventLog::from_records(records, LogMode::Digg);
    return out;
}

} // namespace netdyn
