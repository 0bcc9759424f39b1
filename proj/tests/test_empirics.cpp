#include "support/fixtures.hpp"

#include "netdyn/empirics.hpp"
#include "netdyn/error.hpp"

#include <doctest.h>

#include <cmath>
#include <set>
#include <sstream>

using namespace netdyn;

namespace {

EventRecord submit(std::string item, NodeId user, std::int64_t ts) {
    return {std::move(item), user, ts, EventKind::Submit, 0};
}

EventRecord vote(std::string item, NodeId user, std::int64_t ts) {
    return {std::move(item), user, ts, EventKind::Rebroadcast, 0};
}

EventLog digg(const std::vector<EventRecord>& records) { return EventLog::from_records(records, LogMode::Digg); }

/// Node 0 is followed by 1..followers (edge i -> 0); the remaining nodes up
/// to n follow nobody.
fixtures::Fixture followed_hub(std::size_t followers, std::size_t n) {
    std::vector<Edge> e;
    for (NodeId i = 1; i <= followers; ++i)
        e.push_back({i, 0});
    return fixtures::make(n, e);
}

} // namespace

TEST_CASE("event log reader") {
    SUBCASE("valid log") {
        std::istringstream in("item_id,user_id,timestamp,kind\n"
                              "10,0,100,submit\n"
                              "10,2,105,rebroadcast\n"
                              "10,1,105,rebroadcast\n"
                              "9,1,50,submit\n"
                              "10,3,101,rebroadcast\n");
        const auto log = read_event_log(in, LogMode::Digg);
        REQUIRE(log.items().size() == 2);
        CHECK(log.items()[0].id == "9");
        const auto& item = log.item("10");
        CHECK(item.submit.user == 0);
        REQUIRE(item.rebroadcasts.size() == 3);
        // (timestamp, user) order
        CHECK(item.rebroadcasts[0].user == 3);
        CHECK(item.rebroadcasts[1].user == 1);
        CHECK(item.rebroadcasts[2].user == 2);
        CHECK(log.active_user_count() == 4);

        std::ostringstream out;
        write_event_log(out, log);
        std::istringstream again(out.str());
        const auto round = read_event_log(again, LogMode::Digg);
        std::ostringstream out2;
        write_event_log(out2, round);
        CHECK(out.str() == out2.str());
    }
    SUBCASE("bad header") {
        std::istringstream in("item,user,ts,kind\n");
        CHECK_THROWS_AS(read_event_log(in, LogMode::Digg), InputFormatError);
    }
    SUBCASE("errors name the line") {
        std::istringstream in("item_id,user_id,timestamp,kind\n1,0,100,submit\n1,2,soon,rebroadcast\n");
        CHECK_THROWS_WITH_AS(read_event_log(in, LogMode::Digg, NodeLabels::integers(), "log.csv"),
                             doctest::Contains("log.csv:3"), InputFormatError);
    }
    SUBCASE("missing submit") {
        std::istringstream in("item_id,user_id,timestamp,kind\n1,2,100,rebroadcast\n");
        CHECK_THROWS_WITH_AS(read_event_log(in, LogMode::Digg), doctest::Contains("submit"), InputFormatError);
    }
    SUBCASE("digg allows one vote per user") {
        std::istringstream in("item_id,user_id,timestamp,kind\n1,0,100,submit\n1,2,101,rebroadcast\n"
                              "1,2,102,rebroadcast\n");
        CHECK_THROWS_AS(read_event_log(in, LogMode::Digg), InputFormatError);
        std::istringstream tw("item_id,user_id,timestamp,kind\n1,0,100,submit\n1,2,101,rebroadcast\n"
                              "1,2,102,rebroadcast\n");
        CHECK(read_event_log(tw, LogMode::Twitter).item("1").rebroadcasts.size() == 2);
    }
    SUBCASE("twitter treats the first row as the submission") {
        std::istringstream tw("item_id,user_id,timestamp,kind\nu,4,100,rebroadcast\nu,2,101,rebroadcast\n");
        const auto log = read_event_log(tw, LogMode::Twitter);
        CHECK(log.item("u").submit.user == 4);
        CHECK(log.item("u").rebroadcasts.size() == 1);
    }
    SUBCASE("second submit and early rebroadcasts are rejected") {
        CHECK_THROWS_AS(digg({submit("1", 0, 100), submit("1", 1, 110)}), InputFormatError);
        CHECK_THROWS_AS(digg({submit("1", 0, 100), vote("1", 1, 90)}), InputFormatError);
    }
    SUBCASE("labels resolve through the graph mapping") {
        auto labels = NodeLabels::from_labels({"ann", "bob"});
        std::istringstream in("item_id,user_id,timestamp,kind\nx,bob,1,submit\nx,ann,2,rebroadcast\n");
        const auto log = read_event_log(in, LogMode::Digg, labels);
        CHECK(log.item("x").submit.user == 1);
        CHECK(log.item("x").rebroadcasts[0].user == 0);
    }
}

TEST_CASE("item ids order numerically") {
    CHECK(item_id_less("2", "10"));
    CHECK_FALSE(item_id_less("10", "2"));
    CHECK(item_id_less("99", "a"));
    CHECK(item_id_less("a", "b"));
    CHECK_FALSE(item_id_less("a", "a"));
}

TEST_CASE("extract_cascade examples") {
    // 1 and 2 follow 0, 3 follows 1, 4 follows nobody in the cascade
    auto f = fixtures::make(6, {{1, 0}, {2, 0}, {3, 1}, {4, 5}});
    auto log = digg({submit("a", 0, 0), submit("b", 0, 0), vote("b", 1, 5), submit("c", 0, 0), vote("c", 3, 4),
                     vote("c", 1, 5), vote("c", 4, 6)});
    CHECK(extract_cascade(log, f.graph, "a").size() == 1);
    CHECK(extract_cascade(log, f.graph, "b").size() == 2);

    // 3 votes before 1 joined, 4 follows no member
    auto c = extract_cascade(log, f.graph, "c");
    CHECK(c.members == std::vector<NodeId>{0, 1});
    CHECK_THROWS_AS(extract_cascade(log, f.graph, "zzz"), InvalidArgument);

    auto later = digg({submit("d", 0, 0), vote("d", 1, 5), vote("d", 3, 6), vote("d", 4, 7)});
    c = extract_cascade(later, f.graph, "d");
    CHECK(c.members == std::vector<NodeId>{0, 1, 3});
    CHECK(c.edges == std::vector<std::pair<NodeId, NodeId>>{{0, 1}, {1, 3}});
}

TEST_CASE("cascade parents are all earlier followed members") {
    // 3 follows both 1 and 2
    auto f = fixtures::make(4, {{1, 0}, {2, 0}, {3, 1}, {3, 2}});
    auto log = digg({submit("x", 0, 0), vote("x", 1, 1), vote("x", 2, 2), vote("x", 3, 3)});
    const auto c = extract_cascade(log, f.graph, "x");
    CHECK(c.size() == 4);
    CHECK(c.edges == std::vector<std::pair<NodeId, NodeId>>{{0, 1}, {0, 2}, {1, 3}, {2, 3}});
}

TEST_CASE("local influence examples") {
    auto f = followed_hub(8, 20);

    // submitter 9 has no followers
    auto nobody = digg({submit("1", 9, 0), vote("1", 1, 1), vote("1", 2, 2), submit("2", 9, 0), vote("2", 3, 1)});
    auto est = local_influence(nobody, f.graph);
    REQUIRE(est.size() == 1);
    CHECK(est[0].user == 9);
    CHECK(est[0].local == 0.0);

    // follower rebroadcasts 3 and 5, plus non-followers mixed in
    std::vector<EventRecord> recs{submit("1", 0, 0), submit("2", 0, 0)};
    for (NodeId u = 1; u <= 3; ++u)
        recs.push_back(vote("1", u, u));
    for (NodeId u = 1; u <= 5; ++u)
        recs.push_back(vote("2", u, u));
    recs.push_back(vote("1", 15, 20));
    recs.push_back(vote("2", 16, 20));
    est = local_influence(digg(recs), f.graph);
    REQUIRE(est.size() == 1);
    CHECK(est[0].local == 4.0);
    CHECK(est[0].n_items == 2);
    CHECK(est[0].followers == 8);

    // every rebroadcast by a follower, 7 per item
    recs = {submit("1", 0, 0), submit("2", 0, 0), submit("3", 0, 0)};
    for (const char* item : {"1", "2", "3"})
        for (NodeId u = 1; u <= 7; ++u)
            recs.push_back(vote(item, u, u));
    est = local_influence(digg(recs), f.graph);
    CHECK(est[0].local == 7.0);

    // one item is not enough
    CHECK(local_influence(digg({submit("1", 0, 0), vote("1", 1, 1)}), f.graph).empty());
}

TEST_CASE("local influence window is monotone") {
    auto f = fixtures::random_graph(300, 0.05, 3);
    SynthesisOptions opts;
    opts.submitters = {0, 1, 2, 3, 4};
    opts.transmissibility = 0.08;
    const auto log = synthesize_event_log(f.graph, opts).log;
    std::vector<double> prev;
    for (std::size_t w : {0u, 1u, 5u, 20u, 100u, 1000u}) {
        const auto est = local_influence(log, f.graph, {w, 2, 0});
        if (!prev.empty())
            for (std::size_t i = 0; i < est.size(); ++i)
                CHECK(est[i].local >= prev[i]);
        prev.clear();
        for (const auto& e : est)
            prev.push_back(e.local);
    }
}

TEST_CASE("unknown users are listed") {
    auto f = fixtures::make(3, {{1, 0}});
    auto log = digg({submit("1", 0, 0), vote("1", 7, 1), submit("2", 0, 0), vote("2", 9, 1)});
    CHECK_THROWS_WITH_AS(local_influence(log, f.graph), doctest::Contains("7, 9"), InvalidArgument);
}

TEST_CASE("global influence examples") {
    auto f = fixtures::make(40, {});
    auto quiet = digg({submit("1", 0, 0), submit("2", 0, 0)});
    CHECK(global_influence(quiet, f.graph)[0].global == 1.0);

    // item 1: chain of 9 followers, item 2: chain of 19
    std::vector<Edge> e;
    for (NodeId i = 1; i < 30; ++i)
        e.push_back({i, i - 1});
    auto g = fixtures::make(40, e);
    std::vector<EventRecord> recs{submit("1", 0, 0), submit("2", 0, 0)};
    for (NodeId u = 1; u < 10; ++u)
        recs.push_back(vote("1", u, u));
    for (NodeId u = 1; u < 20; ++u)
        recs.push_back(vote("2", u, u));
    CHECK(global_influence(digg(recs), g.graph)[0].global == 15.0);
}

TEST_CASE("synthesized cascades are recovered exactly") {
    for (std::uint64_t seed = 1; seed <= 4; ++seed) {
        auto f = fixtures::random_graph(400, 0.02, seed);
        SynthesisOptions opts;
        opts.submitters = {0, 10, 20, 30};
        opts.transmissibility = 0.12;
        opts.seed = seed;
        const auto syn = synthesize_event_log(f.graph, opts);
        REQUIRE(syn.log.items().size() == 12);
        const auto est = global_influence(syn.log, f.graph, {100, 1, 0});
        for (std::size_t i = 0; i < syn.log.items().size(); ++i) {
            const auto& item = syn.log.items()[i];
            auto c = extract_cascade(syn.log, f.graph, item.id);
            std::vector<NodeId> members = c.members;
            std::sort(members.begin(), members.end());
            CHECK(members == syn.infected[i]);
            // every non-seed member follows a parent that joined earlier
            std::set<NodeId> seen{item.submit.user};
            for (std::size_t k = 1; k < c.members.size(); ++k) {
                bool has_parent = false;
                for (auto [p, child] : c.edges)
                    if (child == c.members[k]) {
                        CHECK(seen.count(p) == 1);
                        CHECK(f.graph.has_edge(child, p));
                        has_parent = true;
                    }
                CHECK(has_parent);
                seen.insert(c.members[k]);
            }
        }
        for (const auto& e : est) {
            double total = 0.0;
            for (std::size_t i = 0; i < syn.log.items().size(); ++i)
                if (syn.log.items()[i].submit.user == e.user)
                    total += static_cast<double>(syn.infected[i].size());
            CHECK(e.global == doctest::Approx(total / static_cast<double>(e.n_items)));
        }
    }
}

TEST_CASE("hypergeometric pmf examples") {
    CHECK(hypergeometric_pmf(1, 1, 2, 1) == doctest::Approx(0.5).epsilon(1e-14));
    double total = 0.0;
    for (int k = 0; k <= 5; ++k)
        total += hypergeometric_pmf(k, 5, 20, 7);
    CHECK(std::abs(total - 1.0) < 1e-12);
    for (int k = 5; k <= 100; ++k)
        CHECK(hypergeometric_pmf(k, 100, 71367, 100) < 0.05);
    CHECK(hypergeometric_pmf(0, 100, 71367, 100) > 0.8);
    for (std::int64_t K : {100, 1000, 20000, 60000}) {
        double big = 0.0;
        for (std::int64_t k = 0; k <= 100; ++k)
            big += hypergeometric_pmf(k, K, 71367, 100);
        CHECK(std::abs(big - 1.0) < 1e-11);
    }

    CHECK_THROWS_AS(hypergeometric_pmf(3, 2, 10, 5), InvalidArgument);
    CHECK_THROWS_AS(hypergeometric_pmf(1, 11, 10, 5), InvalidArgument);
    CHECK_THROWS_AS(hypergeometric_pmf(1, 5, 10, 11), InvalidArgument);
    CHECK_THROWS_AS(hypergeometric_pmf(-1, 5, 10, 3), InvalidArgument);
    // below the support
    CHECK(hypergeometric_pmf(0, 9, 10, 5) == 0.0);
}

TEST_CASE("hypergeometric pmf matches exact binomial ratios") {
    auto choose = [](int a, int b) {
        double r = 1.0;
        for (int i = 1; i <= b; ++i)
            r = r * (a - b + i) / i;
        return r;
    };
    for (int N = 1; N <= 30; N += 3)
        for (int K = 0; K <= N; K += 2)
            for (int n = 0; n <= N; n += 2)
                for (int k = 0; k <= std::min(K, n); ++k) {
                    const double exact = choose(K, k) * choose(N - K, n - k) / choose(N, n);
                    CHECK(hypergeometric_pmf(k, K, N, n) == doctest::Approx(exact).epsilon(1e-10));
                }
}

TEST_CASE("hypergeometric upper tail") {
    CHECK(hypergeometric_upper_tail(0, 5, 20, 7) == 1.0);
    CHECK(hypergeometric_upper_tail(6, 5, 20, 7) == 0.0);
    double direct = 0.0;
    for (int k = 2; k <= 5; ++k)
        direct += hypergeometric_pmf(k, 5, 20, 7);
    CHECK(hypergeometric_upper_tail(2, 5, 20, 7) == doctest::Approx(direct).epsilon(1e-12));
}

TEST_CASE("significance_screen examples") {
    // K = N: every draw is a follower
    auto everyone = fixtures::make(5, {{1, 0}, {2, 0}, {3, 0}, {4, 0}});
    std::vector<InfluenceEstimate> est{{0, 2, 0, 4.0, 5.0, 1.0}};
    auto kept = significance_screen(est, everyone.graph, 4, 4);
    CHECK(kept.empty());

    auto lonely = fixtures::make(5, {});
    est = {{0, 2, 0, 0.0, 1.0, 1.0}};
    CHECK(significance_screen(est, lonely.graph, 5, 5).empty());
    CHECK(significance_screen(est, lonely.graph, 5, 5, 2.0)[0].significance_p == 1.0);

    auto hub = followed_hub(200, 201);
    est = {{0, 2, 0, 6.0, 10.0, 1.0}};
    kept = significance_screen(est, hub.graph, 71367, 100);
    REQUIRE(kept.size() == 1);
    CHECK(kept[0].followers == 200);
    CHECK(kept[0].significance_p < 1e-4);
}

TEST_CASE("activity entropies") {
    std::vector<EventRecord> recs{submit("many", 0, 0), submit("one", 0, 0), submit("clock", 0, 0),
                                  submit("single", 0, 0)};
    for (NodeId u = 1; u <= 10; ++u)
        recs.push_back(vote("many", u, u * u * 7));
    for (int i = 1; i <= 10; ++i) {
        recs.push_back({"one", 1, i * 13, EventKind::Rebroadcast, 0});
        recs.push_back({"clock", static_cast<NodeId>(i), i * 60, EventKind::Rebroadcast, 0});
    }
    recs.push_back(vote("single", 1, 5));
    const auto log = EventLog::from_records(recs, LogMode::Twitter);

    CHECK(activity_entropies(log, "many").user_bits == doctest::Approx(std::log2(10.0)));
    CHECK(activity_entropies(log, "one").user_bits == 0.0);
    CHECK(activity_entropies(log, "clock").interval_bits == 0.0);
    CHECK_THROWS_WITH_AS(activity_entropies(log, "single"), doctest::Contains("undefined entropy"), InvalidArgument);

    for (const auto& item : log.items()) {
        if (item.rebroadcasts.size() < 2)
            continue;
        const auto h = activity_entropies(log, item.id);
        CHECK(h.user_bits >= 0.0);
        CHECK(h.user_bits <= std::log2(static_cast<double>(item.rebroadcasts.size())) + 1e-12);
    }
}

TEST_CASE("interval bins are logarithmic") {
    CHECK(interval_bin(0) == 0);
    CHECK(interval_bin(1) == 1);
    CHECK(interval_bin(2) == 1);
    CHECK(interval_bin(3) == 2);
    CHECK(interval_bin(1023) == 10);
    CHECK(interval_bin(1022) == 9);
    CHECK_THROWS_AS(interval_bin(-1), InvalidArgument);
}

TEST_CASE("spam_filter examples") {
    std::vector<EventRecord> recs{submit("bot", 0, 0), submit("human", 0, 0), submit("lone", 0, 0)};
    for (int i = 1; i <= 30; ++i)
        recs.push_back({"bot", 1, i * 60, EventKind::Rebroadcast, 0});
    // 20 users, gaps spread over 2^0 .. 2^19 seconds
    std::int64_t t = 0;
    for (NodeId u = 1; u <= 20; ++u) {
        recs.push_back(vote("human", u, t));
        t += (std::int64_t{1} << (u - 1));
    }
    recs.push_back(vote("lone", 1, 3));
    const auto log = EventLog::from_records(recs, LogMode::Twitter);
    const auto h = activity_entropies(log, "human");
    CHECK(h.user_bits > 3.0);
    CHECK(h.interval_bits > 3.0);
    CHECK(spam_filter(log) == std::vector<std::string>{"human"});
    CHECK(spam_filter(log, 0.0) == std::vector<std::string>{"human"});
}

TEST_CASE("pearson_correlation examples") {
    const std::vector<double> x{1, 2, 3, 4, 5};
    std::vector<double> y;
    for (double v : x)
        y.push_back(2 * v + 1);
    CHECK(pearson_correlation(x, y) == doctest::Approx(1.0).epsilon(1e-14));
    std::vector<double> neg;
    for (double v : x)
        neg.push_back(-v);
    CHECK(pearson_correlation(x, neg) == doctest::Approx(-1.0).epsilon(1e-14));
    CHECK(pearson_correlation(std::vector<double>{1, 2, 3, 4}, std::vector<double>{2, 1, 4, 3}) ==
          doctest::Approx(0.6).epsilon(1e-14));
    CHECK_THROWS_WITH_AS(pearson_correlation(x, std::vector<double>(5, 3.0)), doctest::Contains("degenerate cohort"),
                         InvalidArgument);
    CHECK_THROWS_AS(pearson_correlation(std::vector<double>{1, 2}, std::vector<double>{1, 2}), InvalidArgument);
    CHECK_THROWS_AS(pearson_correlation(x, std::vector<double>{1, 2, 3}), InvalidArgument);
}

TEST_CASE("correlation_sweep") {
    auto f = fixtures::random_graph(400, 0.02, 21);
    SynthesisOptions opts;
    for (NodeId u = 0; u < 12; ++u)
        opts.submitters.push_back(u * 7);
    opts.transmissibility = 0.1;
    const auto log = synthesize_event_log(f.graph, opts).log;
    CorrelationOptions copts;
    copts.influence = {100, 2, 0};
    copts.p_cut = 1.0;
    const std::vector<double> grid{0.0, 0.02, 0.04};

    SUBCASE("alpha = 0 reduces to indegree") {
        const std::vector<Measure> ms{Measure::Alpha, Measure::Indegree};
        const auto report = correlation_sweep(f.graph, log, ms, grid, InfluenceKind::Local, copts);
        REQUIRE(report.rows.size() == 6);
        CHECK(report.rows[0].measure == Measure::Alpha);
        CHECK(report.rows[0].pearson_r == doctest::Approx(report.rows[1].pearson_r).epsilon(1e-12));
        CHECK(report.cohort.size() == 12);
        for (const auto& r : report.rows) {
            CHECK(r.pearson_r >= -1.0);
            CHECK(r.pearson_r <= 1.0);
            CHECK(r.cohort_size == 12);
        }
        // manual recomputation at one grid point
        const auto cr = alpha_centrality(f.graph, 0.04);
        const auto est = estimate_influence(log, f.graph, copts.influence);
        std::vector<double> x, y;
        for (const auto& e : est) {
            x.push_back(cr.values[e.user]);
            y.push_back(e.local);
        }
        CHECK(report.rows[4].pearson_r == doctest::Approx(pearson_correlation(x, y)).epsilon(1e-12));
    }
    SUBCASE("undefined centralities become NaN rows") {
        const double lambda1 = spectral_radius(f.graph).lambda1;
        const std::vector<double> wide{0.5 / lambda1, 2.0 / lambda1};
        const std::vector<Measure> ms{Measure::Alpha};
        const auto report = correlation_sweep(f.graph, log, ms, wide, InfluenceKind::Global, copts);
        CHECK(std::isfinite(report.rows[0].pearson_r));
        CHECK(std::isnan(report.rows[1].pearson_r));
        std::ostringstream csv;
        write_correlation_csv(csv, report);
        CHECK(csv.str().find(",alpha,global,nan,12\n") != std::string::npos);
    }
    SUBCASE("small or degenerate cohorts are rejected") {
        const std::vector<Measure> ms{Measure::PageRank};
        auto tight = copts;
        tight.influence.min_item_rebroadcasts = 100000;
        CHECK_THROWS_WITH_AS(correlation_sweep(f.graph, log, ms, grid, InfluenceKind::Local, tight),
                             doctest::Contains("cohort too small"), InvalidArgument);

        std::vector<EventRecord> recs;
        for (NodeId u = 0; u < 4; ++u)
            for (int i = 0; i < 2; ++i)
                recs.push_back(submit(std::to_string(u * 10 + i), u, 0));
        const auto flat = digg(recs);
        CHECK_THROWS_WITH_AS(correlation_sweep(f.graph, flat, ms, grid, InfluenceKind::Global, copts),
                             doctest::Contains("degenerate cohort"), InvalidArgument);
    }
    SUBCASE("json report") {
        const std::vector<Measure> ms{Measure::PageRank};
        const auto report = correlation_sweep(f.graph, log, ms, grid, InfluenceKind::Local, copts);
        std::ostringstream out;
        write_correlation_json(out, report, NodeLabels::integers());
        CHECK(out.str().find("\"measure\": \"pagerank\"") != std::string::npos);
        CHECK(out.str().find("\"cohort\"") != std::string::npos);
    }
}
