// cook — command-line front end: generate hook libraries, run benchmark
// configurations on the mock runtime, and recompute reports from artifacts.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "cook/assets.hpp"
#include "cook/errors.hpp"
#include "cook/metrics.hpp"
#include "cook/toolchain.hpp"
#include "cook/trace.hpp"
#include "cook/workloads.hpp"

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;
using namespace cook;

namespace {

void write_text_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path.string());
    out << text;
    if (!out) throw IoError("write failed: " + path.string());
}

std::string num(double v) { return ordered_json(v).dump(); }

double app_ips(const workloads::AppResult& app, Cycles warmup, Cycles sample,
               Cycles interval) {
    auto counts = metrics::completions_per_interval(app.inference_completions, warmup,
                                                    warmup + sample, interval);
    return metrics::compute_ips(counts);
}

double mean_ips(const workloads::RunResult& res, const workloads::RunConfig& cfg) {
    double sum = 0.0;
    for (const auto& app : res.apps)
        sum += app_ips(app, cfg.warmup_cycles, cfg.sample_cycles, cfg.interval_cycles);
    return sum / static_cast<double>(res.apps.size());
}

ordered_json net_json(const std::map<KernelId, std::vector<Cycles>>& groups) {
    ordered_json kernels = ordered_json::object();
    std::size_t total = 0;
    for (const auto& [id, ets] : groups) {
        metrics::DistSummary s = metrics::summarize(metrics::compute_net(ets));
        ordered_json e;
        e["count"] = ets.size();
        e["median"] = s.median;
        e["p25"] = s.p25;
        e["p75"] = s.p75;
        e["p0_5"] = s.p0_5;
        e["p99_5"] = s.p99_5;
        kernels[std::to_string(id)] = e;
        total += ets.size();
    }
    ordered_json out;
    out["kernels"] = kernels;
    if (total > 0)
        out["tail_fraction_over_2x"] = metrics::net_tail_fraction(groups, 2.0);
    else
        out["tail_fraction_over_2x"] = nullptr;
    return out;
}

Cycles completed_makespan(const std::vector<OpRecord>& records) {
    Cycles mk = 0;
    for (const auto& r : records)
        if (r.completion_seq >= 0 && r.end > mk) mk = r.end;
    return mk;
}

struct RunFlags {
    std::string bench = "mmult";
    std::string isol = "isolation";
    std::string strategy = "none";
    std::uint64_t seed = 1;
    Cycles warmup = 3'000'000;
    Cycles sample = 6'000'000;
    Cycles interval = 1'000'000;
    int instances = 2;
    std::string timing;
};

void add_run_flags(CLI::App* sub, RunFlags& f, bool with_cell) {
    if (with_cell) {
        sub->add_option("--bench", f.bench, "benchmark (mmult|dna)")
            ->check(CLI::IsMember({"mmult", "dna"}));
        sub->add_option("--isol", f.isol, "isolation mode (isolation|parallel)")
            ->check(CLI::IsMember({"isolation", "parallel"}));
        sub->add_option("--strategy", f.strategy,
                        "access-control strategy (none|callback|synced|worker)")
            ->check(CLI::IsMember({"none", "callback", "synced", "worker"}));
    }
    sub->add_option("--seed", f.seed, "run seed");
    sub->add_option("--warmup", f.warmup, "warmup cycles before the sampling window");
    sub->add_option("--sample", f.sample, "sampling window length, cycles");
    sub->add_option("--interval", f.interval, "rate-metric interval, cycles");
    sub->add_option("--instances", f.instances, "instance count in parallel mode")
        ->check(CLI::PositiveNumber);
    sub->add_option("--timing", f.timing, "timing calibration file");
}

workloads::RunConfig to_config(const RunFlags& f) {
    workloads::RunConfig cfg;
    cfg.bench = workloads::bench_from_string(f.bench);
    cfg.isol = workloads::isol_from_string(f.isol);
    cfg.strategy = workloads::strategy_from_string(f.strategy);
    cfg.seed = f.seed;
    cfg.warmup_cycles = f.warmup;
    cfg.sample_cycles = f.sample;
    cfg.interval_cycles = f.interval;
    cfg.parallel_instances = f.instances;
    if (!f.timing.empty()) cfg.engine = load_timing_config(f.timing);
    return cfg;
}

ordered_json config_json(const RunFlags& f) {
    ordered_json c;
    c["bench"] = f.bench;
    c["isol"] = f.isol;
    c["strategy"] = f.strategy;
    c["seed"] = f.seed;
    c["warmup"] = f.warmup;
    c["sample"] = f.sample;
    c["interval"] = f.interval;
    c["instances"] = f.instances;
    c["timing"] = f.timing;
    return c;
}

ordered_json run_metrics_json(const RunFlags& f, const workloads::RunConfig& cfg,
                              const workloads::RunResult& res) {
    ordered_json doc;
    doc["config"] = config_json(f);
    doc["makespan"] = res.makespan;
    doc["events"] = res.events;
    doc["overlap_fraction"] = metrics::overlap_fraction(res.trace);
    ordered_json apps = ordered_json::array();
    double ips_sum = 0.0;
    for (const auto& app : res.apps) {
        double ips =
            app_ips(app, cfg.warmup_cycles, cfg.sample_cycles, cfg.interval_cycles);
        ips_sum += ips;
        ordered_json a;
        a["id"] = app.id;
        a["inferences"] = app.inferences_completed;
        a["barriers"] = app.barriers.size();
        a["ips"] = ips;
        apps.push_back(a);
    }
    doc["ips"] = ips_sum / static_cast<double>(res.apps.size());
    doc["apps"] = apps;
    doc["net"] = net_json(metrics::kernel_ets(res.records, cfg.warmup_cycles));
    return doc;
}

void print_doc(const ordered_json& doc, const std::string& format) {
    if (format == "json") {
        std::cout << doc.dump(2) << "\n";
        return;
    }
    // csv: scalar metrics as key,value rows.
    std::cout << "metric,value\n";
    for (const auto& [key, value] : doc.items()) {
        if (value.is_structured()) continue;
        std::cout << key << "," << value.dump() << "\n";
    }
}

int cmd_gen_hooks(const std::string& iface, const std::string& exports,
                  const std::string& config, const std::string& templates_dir,
                  const std::string& strategy, const std::string& out_dir) {
    const std::string iface_text =
        iface.empty() ? assets::text("interface/runtime_api.txt")
                      : toolchain::slurp_file(iface);
    const std::string exports_text = exports.empty()
                                         ? assets::text("interface/exports.txt")
                                         : toolchain::slurp_file(exports);
    const std::string config_text =
        config.empty() ? assets::builtin_config(strategy) : toolchain::slurp_file(config);
    const toolchain::TemplateSet templates = templates_dir.empty()
                                                 ? assets::builtin_templates(strategy)
                                                 : toolchain::load_templates_dir(templates_dir);

    toolchain::HookBundle bundle =
        toolchain::generate_all(iface_text, exports_text, config_text, templates);
    std::vector<std::string> written = toolchain::write_bundle(bundle, out_dir);

    ordered_json doc;
    doc["strategy"] = bundle.strategy;
    doc["symbols"] = bundle.table.size();
    doc["files_written"] = written.size();
    doc["out"] = out_dir;
    ordered_json loc;
    loc["config"] = bundle.loc.config;
    loc["templates"] = bundle.loc.templates;
    loc["generated"] = bundle.loc.generated;
    loc["ratio"] = bundle.loc.templates > 0
                       ? static_cast<double>(bundle.loc.generated) /
                             static_cast<double>(bundle.loc.templates)
                       : 0.0;
    doc["loc"] = loc;
    std::cout << doc.dump(2) << "\n";
    return 0;
}

int cmd_run(const RunFlags& flags, const std::string& out_dir,
            const std::string& format) {
    workloads::RunConfig cfg = to_config(flags);
    workloads::RunResult res = workloads::run_configuration(cfg);

    fs::create_directories(out_dir);
    write_text_file(fs::path(out_dir) / "trace.csv", res.trace.to_csv());
    write_text_file(fs::path(out_dir) / "records.csv", records_to_csv(res.records));
    ordered_json doc = run_metrics_json(flags, cfg, res);
    write_text_file(fs::path(out_dir) / "metrics.json", doc.dump(2) + "\n");

    print_doc(doc, format);
    return 0;
}

int cmd_report(const std::string& in_dir, const std::string& out_file,
               const RunFlags& flags, const std::string& format) {
    std::ifstream trace_in(fs::path(in_dir) / "trace.csv");
    if (!trace_in) throw IoError("cannot read " + in_dir + "/trace.csv");
    Trace trace = Trace::parse_csv(trace_in);

    std::ifstream rec_in(fs::path(in_dir) / "records.csv");
    if (!rec_in) throw IoError("cannot read " + in_dir + "/records.csv");
    std::vector<OpRecord> records = parse_records_csv(rec_in);

    ordered_json doc;
    ordered_json c;
    c["in"] = in_dir;
    c["warmup"] = flags.warmup;
    c["sample"] = flags.sample;
    c["interval"] = flags.interval;
    doc["config"] = c;
    doc["makespan"] = completed_makespan(records);
    doc["overlap_fraction"] = metrics::overlap_fraction(trace);
    doc["net"] = net_json(metrics::kernel_ets(records, flags.warmup));

    if (!out_file.empty()) write_text_file(out_file, doc.dump(2) + "\n");
    print_doc(doc, format);
    return 0;
}

int cmd_sweep(const RunFlags& flags, const std::vector<std::string>& strategies,
              const std::string& out_file, const std::string& format) {
    const std::vector<std::string> isols = {"isolation", "parallel"};

    ordered_json table;
    for (const auto& isol : isols) {
        ordered_json row;
        for (const auto& strategy : strategies) {
            RunFlags f = flags;
            f.isol = isol;
            f.strategy = strategy;
            workloads::RunConfig cfg = to_config(f);
            workloads::RunResult res = workloads::run_configuration(cfg);
            row[strategy] = mean_ips(res, cfg);
        }
        table[isol] = row;
    }

    ordered_json doc;
    doc["config"] = config_json(flags);
    doc["config"].erase("isol");
    doc["config"].erase("strategy");
    doc["ips"] = table;

    std::string rendered;
    if (format == "json") {
        rendered = doc.dump(2) + "\n";
    } else {
        rendered = "isol";
        for (const auto& s : strategies) rendered += "," + s;
        rendered += "\n";
        for (const auto& isol : isols) {
            rendered += isol;
            for (const auto& s : strategies)
                rendered += "," + num(table[isol][s].get<double>());
            rendered += "\n";
        }
    }
    if (!out_file.empty()) write_text_file(out_file, rendered);
    std::cout << rendered;
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"mock accelerator runtime: hook generation, guarded benchmark runs, "
                 "reports"};
    app.require_subcommand(1);

    // gen-hooks ------------------------------------------------------------
    auto* gen = app.add_subcommand("gen-hooks",
                                   "generate a hook library from an interface definition");
    std::string gen_iface, gen_exports, gen_config, gen_templates, gen_strategy;
    std::string gen_out = "hooks-out";
    gen->add_option("--interface", gen_iface, "interface definition file");
    gen->add_option("--exports", gen_exports, "exported symbol list file");
    gen->add_option("--config", gen_config, "hook configuration file");
    gen->add_option("--templates", gen_templates, "directory of .tmpl code templates");
    gen->add_option("--strategy", gen_strategy,
                    "use built-in assets of this strategy for inputs not given")
        ->check(CLI::IsMember({"none", "callback", "synced", "worker"}));
    gen->add_option("--out", gen_out, "output directory");
    gen->callback([&] {
        if (gen_strategy.empty() && (gen_iface.empty() || gen_exports.empty() ||
                                     gen_config.empty() || gen_templates.empty()))
            throw CLI::ValidationError(
                "gen-hooks",
                "provide --strategy or all of --interface/--exports/--config/--templates");
        cmd_gen_hooks(gen_iface, gen_exports, gen_config, gen_templates, gen_strategy,
                      gen_out);
    });

    // run -------------------------------------------------------------------
    auto* run = app.add_subcommand("run", "run one benchmark configuration");
    RunFlags run_flags;
    std::string run_out, run_format = "json";
    add_run_flags(run, run_flags, /*with_cell=*/true);
    run->add_option("--out", run_out, "artifact directory")->required();
    run->add_option("--format", run_format, "stdout format")
        ->check(CLI::IsMember({"json", "csv"}));
    run->callback([&] { cmd_run(run_flags, run_out, run_format); });

    // report ----------------------------------------------------------------
    auto* report =
        app.add_subcommand("report", "recompute metrics from a run's artifacts");
    RunFlags report_flags;
    std::string report_in, report_out, report_format = "json";
    report->add_option("--in", report_in, "run artifact directory")->required();
    report->add_option("--out", report_out, "write the report to this file");
    add_run_flags(report, report_flags, /*with_cell=*/false);
    report->add_option("--format", report_format, "stdout format")
        ->check(CLI::IsMember({"json", "csv"}));
    report->callback(
        [&] { cmd_report(report_in, report_out, report_flags, report_format); });

    // sweep -----------------------------------------------------------------
    auto* sweep =
        app.add_subcommand("sweep", "run every isolation x strategy cell, emit rates");
    RunFlags sweep_flags;
    sweep_flags.bench = "dna";
    std::vector<std::string> sweep_strategies = {"none", "callback", "synced", "worker"};
    std::string sweep_out, sweep_format = "json";
    sweep->add_option("--bench", sweep_flags.bench, "benchmark (mmult|dna)")
        ->check(CLI::IsMember({"mmult", "dna"}));
    add_run_flags(sweep, sweep_flags, /*with_cell=*/false);
    sweep->add_option("--strategies", sweep_strategies, "strategies to sweep")
        ->delimiter(',')
        ->check(CLI::IsMember({"none", "callback", "synced", "worker"}));
    sweep->add_option("--out", sweep_out, "write the table to this file");
    sweep->add_option("--format", sweep_format, "output format")
        ->check(CLI::IsMember({"json", "csv"}));
    sweep->callback(
        [&] { cmd_sweep(sweep_flags, sweep_strategies, sweep_out, sweep_format); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
