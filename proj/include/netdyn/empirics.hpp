#pragma once

#include "netdyn/centrality.hpp"
#include "netdyn/graph.hpp"
#include "netdyn/io.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace netdyn {

/// Digg: one vote per user per item, explicit submit row. Twitter: repeated
/// posts allowed, the first row of an item is its submission.
enum class LogMode { Digg, Twitter };

std::string_view to_string(LogMode mode);
LogMode parse_log_mode(std::string_view name);

enum class EventKind { Submit, Rebroadcast };

/// One row of an activity log, in file order.
struct EventRecord {
    std::string item_id;
    NodeId user = 0;
    std::int64_t timestamp = 0;
    EventKind kind = EventKind::Rebroadcast;
    std::size_t line = 0; ///< source line, 0 when not from a file
};

struct Event {
    NodeId user = 0;
    std::int64_t timestamp = 0;
};

struct Item {
    std::string id;
    Event submit;
    std::vector<Event> rebroadcasts; ///< ordered by (timestamp, user)
};

/// Item ids compare numerically when both are integers; integers sort before
/// other ids, which compare lexicographically.
bool item_id_less(std::string_view a, std::string_view b);

/**
 * Validated activity log. Items are kept in item_id_less order; each has
 * exactly one submission, which is never later than its rebroadcasts.
 */
class EventLog {
public:
    /// Throws InputFormatError naming the offending record.
    static EventLog from_records(std::span<const EventRecord> records, LogMode mode,
                                 NodeLabels labels = NodeLabels::integers(),
                                 const std::string& source = "<memory>");

    LogMode mode() const noexcept { return mode_; }
    const std::vector<Item>& items() const noexcept { return items_; }
    const NodeLabels& labels() const noexcept { return labels_; }

    /// Throws InvalidArgument for unknown ids.
    const Item& item(std::string_view id) const;
    bool contains(std::string_view id) const;

    /// Same log restricted to the given item ids.
    EventLog subset(std::span<const std::string> ids) const;

    /// Distinct users appearing anywhere in the log.
    std::size_t active_user_count() const;

    std::vector<EventRecord> records() const;

private:
    LogMode mode_ = LogMode::Digg;
    std::vector<Item> items_;
    NodeLabels labels_ = NodeLabels::integers();
};

/**
 * CSV with header "item_id,user_id,timestamp,kind"; kind is "submit" or
 * "rebroadcast", timestamps are integer epoch seconds. User ids resolve
 * through `labels` (unknown labels receive fresh ids past the graph).
 */
EventLog read_event_log(std::istream& in, LogMode mode, NodeLabels labels = NodeLabels::integers(),
                        const std::string& source = "<memory>");
EventLog read_event_log_file(const std::string& path, LogMode mode, NodeLabels labels = NodeLabels::integers());
void write_event_log(std::ostream& out, const EventLog& log);

/// Follower-linked diffusion tree of one item. An edge u -> v in the follower
/// graph means u follows v.
struct Cascade {
    std::string item_id;
    std::vector<NodeId> members;                      ///< join order, submitter first
    std::vector<std::pair<NodeId, NodeId>> edges;     ///< (parent, child)

    std::size_t size() const noexcept { return members.size(); }
};

/**
 * Starts from the submitter; a rebroadcaster joins when it follows at least
 * one member that joined before it, and every such member is recorded as a
 * parent. Rebroadcasters connected to no member are left out.
 */
Cascade extract_cascade(const EventLog& log, const DirectedGraph& g, std::string_view item_id);

struct InfluenceOptions {
    std::size_t window = 100;              ///< first rebroadcasts counted for local influence
    std::size_t min_items = 2;             ///< qualifying items a submitter needs
    std::size_t min_item_rebroadcasts = 0; ///< rebroadcasts an item needs to qualify
};

struct InfluenceEstimate {
    NodeId user = 0;
    std::size_t n_items = 0;
    std::size_t followers = 0;   ///< K, in-degree in the follower graph
    double local = 0.0;          ///< mean follower rebroadcasts within the window
    double global = 0.0;         ///< mean cascade size
    double significance_p = 1.0;
};

/// Both influence measures for every submitter with enough qualifying items,
/// ordered by user id. Throws InvalidArgument listing users missing from g.
std::vector<InfluenceEstimate> estimate_influence(const EventLog& log, const DirectedGraph& g,
                                                  const InfluenceOptions& opts = {});
std::vector<InfluenceEstimate> local_influence(const EventLog& log, const DirectedGraph& g,
                                               const InfluenceOptions& opts = {});
std::vector<InfluenceEstimate> global_influence(const EventLog& log, const DirectedGraph& g,
                                                const InfluenceOptions& opts = {});

/// P(X = k) for k white balls in n draws without replacement from N balls,
/// K of them white. Evaluated in log space.
double hypergeometric_pmf(std::int64_t k, std::int64_t K, std::int64_t N, std::int64_t n);
/// P(X >= k).
double hypergeometric_upper_tail(std::int64_t k, std::int64_t K, std::int64_t N, std::int64_t n);

/**
 * Keeps users whose mean follower rebroadcast count is unlikely under random
 * voting: P(X >= ceil(local) | K followers, N active users, n draws) < p_cut.
 * Returned estimates carry that probability.
 */
std::vector<InfluenceEstimate> significance_screen(std::span<const InfluenceEstimate> estimates,
                                                   const DirectedGraph& g, std::int64_t N, std::int64_t n,
                                                   double p_cut = 0.05);

struct ActivityEntropy {
    double user_bits = 0.0;     ///< entropy of rebroadcasts per distinct user
    double interval_bits = 0.0; ///< entropy of binned gaps between rebroadcasts
};

/// Gap bin: floor(log2(1 + seconds)).
unsigned interval_bin(std::int64_t seconds);

/// Throws InvalidArgument("undefined entropy") for items with fewer than two rebroadcasts.
ActivityEntropy activity_entropies(const EventLog& log, std::string_view item_id);

/// Items whose user and interval entropies both exceed `threshold` bits.
std::vector<std::string> spam_filter(const EventLog& log, double threshold = 3.0);

/// Sample Pearson correlation. Throws InvalidArgument("degenerate cohort")
/// when either side has zero variance.
double pearson_correlation(std::span<const double> x, std::span<const double> y);

enum class InfluenceKind { Local, Global };
std::string_view to_string(InfluenceKind kind);
InfluenceKind parse_influence_kind(std::string_view name);

struct CorrelationOptions {
    InfluenceOptions influence{100, 2, 100};
    bool apply_spam_filter = false;
    double entropy_threshold = 3.0;
    double p_cut = 0.05;          ///< values >= 1 disable the significance screen
    std::int64_t active_users = 0; ///< N of the screen; 0 uses the graph's node count
    CentralityOptions centrality;
};

struct CorrelationRow {
    double alpha = 0.0;
    Measure measure = Measure::PageRank;
    InfluenceKind influence = InfluenceKind::Local;
    double pearson_r = 0.0;  ///< NaN when the centrality is undefined at this alpha
    std::size_t cohort_size = 0;
};

struct CorrelationReport {
    std::vector<double> alphas;
    std::vector<NodeId> cohort;
    std::vector<CorrelationRow> rows; ///< alpha-major, measures in request order
};

/**
 * Correlates centrality scores of the screened cohort with its empirical
 * influence for every (alpha, measure) pair. Throws InvalidArgument when
 * fewer than three users survive the screens.
 */
CorrelationReport correlation_sweep(const DirectedGraph& g, const EventLog& log, std::span<const Measure> measures,
                                    std::span<const double> alpha_grid, InfluenceKind influence,
                                    const CorrelationOptions& opts = {});

void write_correlation_csv(std::ostream& out, const CorrelationReport& report);
void write_correlation_json(std::ostream& out, const CorrelationReport& report, const NodeLabels& labels);

struct SynthesisOptions {
    std::vector<NodeId> submitters;
    std::size_t items_per_submitter = 3;
    double transmissibility = 0.1;
    std::uint64_t seed = 1;
    std::int64_t start_time = 1'600'000'000;
    std::int64_t item_spacing = 86'400;
    std::int64_t round_seconds = 600; ///< cascade round r lands in ((r-1) rs, r rs) after the submit
};

struct SynthesizedLog {
    EventLog log;
    std::vector<std::vector<NodeId>> infected; ///< per item, ascending, in log item order
};

/**
 * Broadcast-generated activity: each item runs an independent cascade from its
 * submitter along reversed follower edges (a post reaches the followers of
 * whoever shared it) and logs every infection as a rebroadcast.
 */
SynthesizedLog synthesize_event_log(const DirectedGraph& g, const SynthesisOptions& opts);

} // namespace netdyn
