#pragma once

#include <map>
#include <string>
#include <vector>

#include "cook/trace.hpp"
#include "cook/types.hpp"

namespace cook {
namespace metrics {

// Normalized execution times of one sample group (same kernel identity,
// same configuration): net[i] = et[i] / min(et). Throws MetricsError on an
// empty group or a zero execution time.
std::vector<double> compute_net(const std::vector<Cycles>& group_ets);

// Completion counts per fixed-width interval across [window_start,
// window_end). Only whole intervals are counted; a trailing partial
// interval is dropped. Throws MetricsError when the interval is zero or no
// whole interval fits the window.
std::vector<std::int64_t> completions_per_interval(
    const std::vector<Cycles>& completion_times, Cycles window_start,
    Cycles window_end, Cycles interval);

// Aggregate rate: the mean of per-interval completion counts.
// Throws MetricsError on empty input.
double compute_ips(const std::vector<std::int64_t>& per_interval_counts);

// Box-and-whisker summary. Percentiles use the nearest-rank method:
// rank(p) = ceil(p/100 * N) clamped to [1, N], value = sorted[rank-1].
struct DistSummary {
    double median = 0.0;
    double p25 = 0.0;
    double p75 = 0.0;
    double p0_5 = 0.0;   // lower whisker
    double p99_5 = 0.0;  // upper whisker; 0.5% tails fall outside
};

// Nearest-rank percentile of an ascending-sorted vector, p in (0, 100].
double percentile_nearest_rank(const std::vector<double>& sorted_values, double p);

DistSummary summarize(std::vector<double> values);  // MetricsError when empty

// Fraction of busy device time during which at least two applications have
// an executing unit, over the trace's positive-length execution rows.
// Exactly 0.0 when executions never overlap across applications.
double overlap_fraction(const Trace& trace);

// Span from the earliest start to the latest end over completed operation
// records. Throws MetricsError when nothing completed.
Cycles makespan(const std::vector<OpRecord>& records);

// Writes the trace in chronogram CSV form. Throws MetricsError on an empty
// trace and IoError on an unwritable path.
void export_chronogram(const Trace& trace, const std::string& path);

// Execution times of completed kernel launches that started at or after
// `from`, grouped by kernel identity and pooled across applications.
std::map<KernelId, std::vector<Cycles>> kernel_ets(const std::vector<OpRecord>& records,
                                                   Cycles from = 0);

// Fraction of kernel samples (all groups pooled) whose NET exceeds
// `threshold`. Throws MetricsError when there are no samples.
double net_tail_fraction(const std::map<KernelId, std::vector<Cycles>>& groups,
                         double threshold);

}  // namespace metrics
}  // namespace cook
