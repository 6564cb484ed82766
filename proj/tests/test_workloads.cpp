#include <set>
#include <string>

#include "doctest.h"

#include "cook/assets.hpp"
#include "cook/errors.hpp"
#include "cook/metrics.hpp"
#include "cook/workloads.hpp"

using namespace cook;
using namespace cook::workloads;

TEST_CASE("benchmark name round trips") {
    CHECK(bench_from_string("mmult") == Bench::MmultLike);
    CHECK(bench_from_string("dna") == Bench::DnaLike);
    CHECK(std::string(to_string(Bench::MmultLike)) == "mmult");
    CHECK(std::string(to_string(Bench::DnaLike)) == "dna");
    CHECK(isol_from_string("isolation") == Isol::Isolation);
    CHECK(isol_from_string("parallel") == Isol::Parallel);
    for (Strategy s : {Strategy::None, Strategy::Callback, Strategy::Synced,
                       Strategy::Worker})
        CHECK(strategy_from_string(to_string(s)) == s);
    CHECK_THROWS_AS(bench_from_string("mmult "), ConfigError);
    CHECK_THROWS_AS(isol_from_string("solo"), ConfigError);
    CHECK_THROWS_AS(strategy_from_string("lockstep"), ConfigError);
}

TEST_CASE("the mmult plan is one fixed barriered burst") {
    InferencePlan plan = gen_mmult_workload(1);
    REQUIRE(plan.bursts.size() == 1);
    const Burst& b = plan.bursts[0];
    CHECK(b.barrier);
    REQUIRE(b.calls.size() == 300);
    for (const BurstCall& c : b.calls) {
        CHECK(c.kind == RoutineKind::KernelLaunch);
        CHECK(c.kernel == mmult_kernel_def().id);
        CHECK(c.grid.blocks == 200);
        CHECK(c.grid.threads_per_block == 256);
    }

    // Shape is seed-independent: the same work runs no matter the seed.
    InferencePlan other = gen_mmult_workload(99);
    REQUIRE(other.bursts.size() == 1);
    REQUIRE(other.bursts[0].calls.size() == 300);
    CHECK(other.bursts[0].calls[17].grid.blocks == 200);
}

TEST_CASE("dna inferences are bounded, barriered and table-driven") {
    std::set<std::size_t> distinct_shapes;
    for (int idx = 0; idx < 20; ++idx) {
        InferencePlan plan = gen_dna_inference(42, idx);
        CHECK(plan.bursts.size() >= 2);
        CHECK(plan.bursts.size() <= 4);
        std::size_t total_calls = 0;
        for (const Burst& b : plan.bursts) {
            CHECK(b.barrier);
            CHECK(b.calls.size() >= 30);
            CHECK(b.calls.size() <= 80);
            total_calls += b.calls.size();
            for (const BurstCall& c : b.calls) {
                switch (c.kind) {
                    case RoutineKind::KernelLaunch: {
                        const KernelDef* def = find_kernel_def(c.kernel);
                        REQUIRE(def != nullptr);
                        CHECK(c.grid.valid());
                        CHECK(c.grid.blocks >= 4);
                        CHECK(c.grid.blocks <= 64);
                        break;
                    }
                    case RoutineKind::MemCopy:
                        CHECK(c.copy.size_bytes >= 1024);
                        CHECK(c.copy.size_bytes <= 128 * 1024);
                        break;
                    case RoutineKind::Other:
                        break;
                    default:
                        FAIL("unexpected call kind in a dna plan");
                }
            }
        }
        distinct_shapes.insert(total_calls);
    }
    CHECK(distinct_shapes.size() > 1);  // the index actually varies the plan

    // Same (seed, index) must reproduce the same plan.
    InferencePlan a = gen_dna_inference(7, 3);
    InferencePlan b = gen_dna_inference(7, 3);
    REQUIRE(a.bursts.size() == b.bursts.size());
    for (std::size_t i = 0; i < a.bursts.size(); ++i) {
        REQUIRE(a.bursts[i].calls.size() == b.bursts[i].calls.size());
        for (std::size_t j = 0; j < a.bursts[i].calls.size(); ++j) {
            CHECK(a.bursts[i].calls[j].kind == b.bursts[i].calls[j].kind);
            CHECK(a.bursts[i].calls[j].kernel == b.bursts[i].calls[j].kernel);
            CHECK(a.bursts[i].calls[j].grid.blocks == b.bursts[i].calls[j].grid.blocks);
            CHECK(a.bursts[i].calls[j].copy.size_bytes == b.bursts[i].calls[j].copy.size_bytes);
        }
    }
}

TEST_CASE("the seed mixer separates its argument lanes") {
    CHECK(mix_seed(1, 2, 3) != mix_seed(1, 2, 4));
    CHECK(mix_seed(1, 2, 3) != mix_seed(1, 3, 2));
    CHECK(mix_seed(1, 2, 3) != mix_seed(3, 2, 1));
    CHECK(mix_seed(5, 9) == mix_seed(5, 9, 0));
}

TEST_CASE("the shipped calibration file matches the built-in defaults") {
    EngineConfig parsed = parse_timing_config(assets::text("timing/default.timing"));
    EngineConfig defaults{};
    CHECK(parsed.spec.sm_count == defaults.spec.sm_count);
    CHECK(parsed.spec.max_blocks_per_sm == defaults.spec.max_blocks_per_sm);
    CHECK(parsed.timing.block_base_cycles == defaults.timing.block_base_cycles);
    CHECK(parsed.timing.copy_cycles_per_byte == defaults.timing.copy_cycles_per_byte);
    CHECK(parsed.timing.context_switch_cycles == defaults.timing.context_switch_cycles);
    CHECK(parsed.timing.cold_penalty_factor == defaults.timing.cold_penalty_factor);
    CHECK(parsed.timing.callback_host_cycles == defaults.timing.callback_host_cycles);
    CHECK(parsed.timing.timeslice_cycles == defaults.timing.timeslice_cycles);
    CHECK(parsed.timing.jitter_pct == defaults.timing.jitter_pct);
}

namespace {

RunConfig small_dna(Strategy s, Isol isol, std::uint64_t seed) {
    RunConfig c;
    c.bench = Bench::DnaLike;
    c.isol = isol;
    c.strategy = s;
    c.seed = seed;
    c.warmup_cycles = 200'000;
    c.sample_cycles = 600'000;
    c.interval_cycles = 200'000;
    return c;
}

}  // namespace

TEST_CASE("a small unguarded run completes and produces artifacts") {
    RunResult r = run_configuration(small_dna(Strategy::None, Isol::Isolation, 11));
    REQUIRE(r.apps.size() == 1);
    CHECK(r.apps[0].inferences_completed >= 1);
    CHECK(r.apps[0].inference_completions.size() ==
          static_cast<std::size_t>(r.apps[0].inferences_completed));
    CHECK_FALSE(r.apps[0].barriers.empty());
    CHECK_FALSE(r.records.empty());
    CHECK_FALSE(r.trace.empty());
    CHECK(r.makespan > 0);
    CHECK(r.events > 0);
}

TEST_CASE("parallel runs host one mirrored instance per slot") {
    RunConfig c = small_dna(Strategy::Synced, Isol::Parallel, 5);
    c.parallel_instances = 3;
    RunResult r = run_configuration(c);
    REQUIRE(r.apps.size() == 3);
    for (const AppResult& a : r.apps) CHECK(a.inferences_completed >= 1);
}

TEST_CASE("every strategy finishes a small parallel run") {
    for (Strategy s : {Strategy::None, Strategy::Callback, Strategy::Synced,
                       Strategy::Worker}) {
        CAPTURE(to_string(s));
        RunResult r = run_configuration(small_dna(s, Isol::Parallel, 23));
        REQUIRE(r.apps.size() == 2);
        CHECK(r.apps[0].inferences_completed >= 1);
        CHECK(r.apps[1].inferences_completed >= 1);
    }
}

TEST_CASE("identical configurations reproduce the trace byte for byte") {
    RunConfig c = small_dna(Strategy::Worker, Isol::Parallel, 31);
    RunResult a = run_configuration(c);
    RunResult b = run_configuration(c);
    CHECK(a.trace.to_csv() == b.trace.to_csv());
    CHECK(records_to_csv(a.records) == records_to_csv(b.records));
    CHECK(a.events == b.events);

    RunConfig other = c;
    other.seed = 32;
    RunResult d = run_configuration(other);
    CHECK(a.trace.to_csv() != d.trace.to_csv());
}

TEST_CASE("configuration validation rejects nonsense") {
    RunConfig c = small_dna(Strategy::None, Isol::Parallel, 1);
    c.parallel_instances = 0;
    CHECK_THROWS_AS(run_configuration(c), ConfigError);
    c = small_dna(Strategy::None, Isol::Isolation, 1);
    c.interval_cycles = 0;
    CHECK_THROWS_AS(run_configuration(c), ConfigError);
}

TEST_CASE("an event budget converts runaway runs into errors") {
    RunConfig c = small_dna(Strategy::None, Isol::Parallel, 3);
    c.event_budget = 50;  // absurdly small: must trip immediately
    CHECK_THROWS_AS(run_configuration(c), SimError);
}

TEST_CASE("the plan runner issues every plan exactly once") {
    PlanRun pr;
    pr.seed = 17;
    pr.strategies = {Strategy::Synced, Strategy::Worker};
    pr.plans.resize(2);
    pr.plans[0].push_back(gen_dna_inference(17, 0));
    pr.plans[1].push_back(gen_dna_inference(17, 1));
    pr.plans[1].push_back(gen_dna_inference(17, 2));

    RunResult r = run_plans(pr);
    REQUIRE(r.apps.size() == 2);
    CHECK(r.apps[0].inferences_completed == 1);
    CHECK(r.apps[1].inferences_completed == 2);

    // Per-app issue order must match completion order: sort records by id
    // and require completion sequence numbers to increase.
    for (const AppResult& app : r.apps) {
        std::int64_t last_seq = -1;
        for (const OpRecord& rec : r.records) {  // records are id-ordered
            if (rec.app != app.id || rec.completion_seq < 0) continue;
            CHECK(rec.completion_seq > last_seq);
            last_seq = rec.completion_seq;
        }
    }

    CHECK(run_plans(pr).trace.to_csv() == r.trace.to_csv());

    PlanRun bad = pr;
    bad.plans.pop_back();
    CHECK_THROWS_AS(run_plans(bad), ConfigError);
}
