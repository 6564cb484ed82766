#include "cook/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "cook/errors.hpp"
#include "cook/gpu.hpp"

namespace cook {
namespace metrics {

std::vector<double> compute_net(const std::vector<Cycles>& group_ets) {
    if (group_ets.empty())
        throw MetricsError("cannot normalize an empty execution-time group");
    Cycles lo = *std::min_element(group_ets.begin(), group_ets.end());
    if (lo == 0) throw MetricsError("execution time of zero cycles in sample group");
    std::vector<double> net;
    net.reserve(group_ets.size());
    for (Cycles et : group_ets)
        net.push_back(static_cast<double>(et) / static_cast<double>(lo));
    return net;
}

std::vector<std::int64_t> completions_per_interval(
    const std::vector<Cycles>& completion_times, Cycles window_start,
    Cycles window_end, Cycles interval) {
    if (interval == 0) throw MetricsError("sampling interval must be positive");
    if (window_end < window_start)
        throw MetricsError("sampling window ends before it starts");
    Cycles span = window_end - window_start;
    std::size_t buckets = static_cast<std::size_t>(span / interval);
    if (buckets == 0)
        throw MetricsError("sampling window shorter than one interval");
    std::vector<std::int64_t> counts(buckets, 0);
    for (Cycles t : completion_times) {
        if (t < window_start) continue;
        Cycles off = t - window_start;
        std::size_t b = static_cast<std::size_t>(off / interval);
        if (b < buckets) counts[b] += 1;
    }
    return counts;
}

double compute_ips(const std::vector<std::int64_t>& per_interval_counts) {
    if (per_interval_counts.empty())
        throw MetricsError("cannot average zero intervals");
    double sum = 0.0;
    for (std::int64_t c : per_interval_counts) sum += static_cast<double>(c);
    return sum / static_cast<double>(per_interval_counts.size());
}

double percentile_nearest_rank(const std::vector<double>& sorted_values, double p) {
    if (sorted_values.empty()) throw MetricsError("percentile of an empty vector");
    std::size_t n = sorted_values.size();
    std::size_t rank = static_cast<std::size_t>(
        std::ceil(p / 100.0 * static_cast<double>(n)));
    if (rank < 1) rank = 1;
    if (rank > n) rank = n;
    return sorted_values[rank - 1];
}

DistSummary summarize(std::vector<double> values) {
    if (values.empty()) throw MetricsError("cannot summarize an empty sample set");
    std::sort(values.begin(), values.end());
    DistSummary s;
    s.median = percentile_nearest_rank(values, 50.0);
    s.p25 = percentile_nearest_rank(values, 25.0);
    s.p75 = percentile_nearest_rank(values, 75.0);
    s.p0_5 = percentile_nearest_rank(values, 0.5);
    s.p99_5 = percentile_nearest_rank(values, 99.5);
    return s;
}

double overlap_fraction(const Trace& trace) {
    // Sweep the execution rows once, tracking how many apps have at least
    // one unit running. Zero-length rows (markers) carry no busy time.
    struct Edge {
        Cycles t;
        int delta;  // +1 start, -1 end
        AppId app;
    };
    std::vector<Edge> edges;
    for (const TraceEvent& ev : trace.events()) {
        if (ev.kind != EventKind::BlockExec) continue;
        if (ev.end <= ev.start) continue;
        edges.push_back(Edge{ev.start, +1, ev.app});
        edges.push_back(Edge{ev.end, -1, ev.app});
    }
    if (edges.empty()) return 0.0;
    std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
        if (a.t != b.t) return a.t < b.t;
        return a.delta < b.delta;  // close intervals before opening new ones
    });

    std::map<AppId, int> active;
    int apps_busy = 0;
    Cycles busy = 0, multi = 0;
    Cycles prev = edges.front().t;
    for (const Edge& e : edges) {
        if (e.t > prev) {
            Cycles span = e.t - prev;
            if (apps_busy >= 1) busy += span;
            if (apps_busy >= 2) multi += span;
            prev = e.t;
        }
        int& n = active[e.app];
        if (e.delta > 0) {
            if (n == 0) ++apps_busy;
            ++n;
        } else {
            --n;
            if (n == 0) --apps_busy;
        }
    }
    if (busy == 0) return 0.0;
    if (multi == 0) return 0.0;
    return static_cast<double>(multi) / static_cast<double>(busy);
}

Cycles makespan(const std::vector<OpRecord>& records) {
    bool any = false;
    Cycles lo = 0, hi = 0;
    for (const OpRecord& r : records) {
        if (r.completion_seq < 0) continue;
        if (!any) {
            lo = r.start;
            hi = r.end;
            any = true;
        } else {
            lo = std::min(lo, r.start);
            hi = std::max(hi, r.end);
        }
    }
    if (!any) throw MetricsError("no completed operations to span");
    return hi - lo;
}

void export_chronogram(const Trace& trace, const std::string& path) {
    if (trace.empty()) throw MetricsError("refusing to export an empty chronogram");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write chronogram: " + path);
    trace.write_csv(out);
    if (!out) throw IoError("write failed: " + path);
}

std::map<KernelId, std::vector<Cycles>> kernel_ets(const std::vector<OpRecord>& records,
                                                   Cycles from) {
    std::map<KernelId, std::vector<Cycles>> groups;
    for (const OpRecord& r : records) {
        if (r.completion_seq < 0) continue;
        if (r.kind != static_cast<int>(RoutineKind::KernelLaunch)) continue;
        if (r.start < from) continue;
        groups[r.kernel].push_back(r.end - r.start);
    }
    return groups;
}

double net_tail_fraction(const std::map<KernelId, std::vector<Cycles>>& groups,
                         double threshold) {
    std::size_t total = 0, over = 0;
    for (const auto& [kernel, ets] : groups) {
        std::vector<double> net = compute_net(ets);
        for (double v : net) {
            ++total;
            if (v > threshold) ++over;
        }
    }
    if (total == 0) throw MetricsError("no kernel samples to classify");
    return static_cast<double>(over) / static_cast<double>(total);
}

}  // namespace metrics
}  // namespace cook
