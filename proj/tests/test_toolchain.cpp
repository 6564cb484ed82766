#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "doctest.h"

#include "cook/assets.hpp"
#include "cook/errors.hpp"
#include "cook/toolchain.hpp"

using namespace cook;
using namespace cook::toolchain;

namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("cook-test-" + std::to_string(::getpid()) + "-" +
                std::to_string(counter()++));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
    static int& counter() {
        static int n = 0;
        return n;
    }
};

void write_file(const fs::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    out << text;
}

HookBundle builtin_bundle(const std::string& strategy) {
    return generate_all(assets::text("interface/runtime_api.txt"),
                        assets::text("interface/exports.txt"),
                        assets::builtin_config(strategy),
                        assets::builtin_templates(strategy));
}

}  // namespace

TEST_CASE("extract_symbols deduplicates and preserves first-seen order") {
    auto syms = extract_symbols("b\na\n# comment\nb\n\nc\na\n");
    CHECK(syms == std::vector<std::string>{"b", "a", "c"});
}

TEST_CASE("extract_symbols keeps large lists intact") {
    std::string text;
    for (int i = 0; i < 385; ++i) text += "sym_" + std::to_string(i) + "\n";
    CHECK(extract_symbols(text).size() == 385);
}

TEST_CASE("an empty export list is an error") {
    CHECK_THROWS_AS(extract_symbols(""), EmptyInterfaceError);
    CHECK_THROWS_AS(extract_symbols("# only comments\n\n"), EmptyInterfaceError);
}

TEST_CASE("export entries must be symbol names") {
    CHECK_THROWS_AS(extract_symbols("good\nnot a symbol\n"), ParseError);
    try {
        extract_symbols("good\nnot a symbol\n");
    } catch (const ParseError& e) {
        CHECK(e.line() == 2);
    }
}

TEST_CASE("interface declarations parse into typed signatures") {
    auto defs = parse_interface(
        "# runtime api\n"
        "status_t cudaLaunchKernel(kernel_t func, grid_t grid, args_t args, stream_t stream)\n"
        "int f(void)\n"
        "void g()\n");
    REQUIRE(defs.size() == 3);

    const Declaration* launch = find_declaration("cudaLaunchKernel", defs);
    REQUIRE(launch != nullptr);
    CHECK(launch->sig.return_type == "status_t");
    REQUIRE(launch->sig.params.size() == 4);
    CHECK(launch->sig.params[0].name == "func");
    CHECK(launch->sig.params[1].name == "grid");
    CHECK(launch->sig.params[2].name == "args");
    CHECK(launch->sig.params[3].name == "stream");

    CHECK(find_declaration("f", defs)->sig.params.empty());
    CHECK(find_declaration("g", defs)->sig.params.empty());
    CHECK(find_declaration("nope", defs) == nullptr);
}

TEST_CASE("malformed declarations carry their line number") {
    try {
        parse_interface("int ok(void)\nint broken(\n");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line() == 2);
    }
    CHECK_THROWS_AS(parse_interface("int f(int)\n"), ParseError);       // nameless param
    CHECK_THROWS_AS(parse_interface("f(void)\n"), ParseError);          // no return type
    CHECK_THROWS_AS(parse_interface("int f(void)\nint f(void)\n"), ParseError);  // dup
}

TEST_CASE("glob matching: exact, star, question mark, backtracking") {
    CHECK(glob_match("cudaMalloc", "cudaMalloc"));
    CHECK_FALSE(glob_match("cudaMalloc", "cudaMallocHost"));
    CHECK(glob_match("cudaMemcpy*", "cudaMemcpy"));
    CHECK(glob_match("cudaMemcpy*", "cudaMemcpyAsync"));
    CHECK_FALSE(glob_match("cudaMemcpy*", "cudaMemset"));
    CHECK(glob_match("*", "anything"));
    CHECK(glob_match("*", ""));
    CHECK(glob_match("cuda?etDevice", "cudaGetDevice"));
    CHECK(glob_match("cuda?etDevice", "cudaSetDevice"));
    CHECK_FALSE(glob_match("cuda?etDevice", "cudaResetDevice"));
    CHECK(glob_match("a*b*c", "aXXbYYc"));
    CHECK(glob_match("a*b*c", "abc"));
    CHECK_FALSE(glob_match("a*b*c", "aXXbYY"));
    CHECK(glob_match("*Async", "cudaMemcpyAsync"));
    CHECK_FALSE(glob_match("*Async", "cudaMemcpy"));
}

TEST_CASE("hook configs parse directives in order") {
    HookConfig cfg = HookConfig::parse(
        "strategy demo\n"
        "hook cudaLaunch* launch-tpl sync=device extra2=7\n"
        "hook * catchall-tpl\n"
        "ignore cudaGet*\n"
        "ignore cudaSet*\n"
        "default error\n");
    CHECK(cfg.strategy == "demo");
    REQUIRE(cfg.conditions.size() == 2);
    CHECK(cfg.conditions[0].pattern == "cudaLaunch*");
    CHECK(cfg.conditions[0].template_id == "launch-tpl");
    CHECK(cfg.conditions[0].extras.at("sync") == "device");
    CHECK(cfg.conditions[0].extras.at("extra2") == "7");
    CHECK(cfg.conditions[1].pattern == "*");
    CHECK(cfg.ignore_patterns == std::vector<std::string>{"cudaGet*", "cudaSet*"});
}

TEST_CASE("hook config rejects malformed directives") {
    CHECK_THROWS_AS(HookConfig::parse("strategy a\nfrobnicate x\n"), ParseError);
    CHECK_THROWS_AS(HookConfig::parse("strategy a\nhook onlypattern\n"), ParseError);
    CHECK_THROWS_AS(HookConfig::parse("strategy a\nhook p t notkv\n"), ParseError);
    CHECK_THROWS_AS(HookConfig::parse("strategy a\ndefault warn\n"), ParseError);
    CHECK_THROWS_AS(HookConfig::parse("ignore *\n"), ParseError);  // no strategy
    CHECK_THROWS_AS(HookConfig::parse("strategy a\nstrategy b\n"), ParseError);
}

TEST_CASE("template rendering substitutes every placeholder") {
    Signature sig{"status_t",
                  {{"kernel_t", "func"}, {"stream_t", "stream"}}};
    std::string body =
        "hook {return_type} {symbol}({params}) {\n"
        "@each_param   take {param_type} {param_name} at {param_index}\n"
        "  wait {extra:sync}\n"
        "  return real::{symbol}({param_names})\n"
        "}\n";
    std::string out = render_template(body, "cudaLaunchKernel", sig, {{"sync", "device"}});
    CHECK(out ==
          "hook status_t cudaLaunchKernel(kernel_t func, stream_t stream) {\n"
          "  take kernel_t func at 0\n"
          "  take stream_t stream at 1\n"
          "  wait device\n"
          "  return real::cudaLaunchKernel(func, stream)\n"
          "}\n");
}

TEST_CASE("zero-parameter renders print void and drop per-param lines") {
    Signature sig{"int", {}};
    std::string out = render_template(
        "fn {symbol}({params})\n@each_param   x {param_name}\nend\n", "f", sig, {});
    CHECK(out == "fn f(void)\nend\n");
}

TEST_CASE("unknown placeholders and missing extras are config errors") {
    Signature sig{"int", {{"int", "a"}}};
    CHECK_THROWS_AS(render_template("{nope}\n", "f", sig, {}), ConfigError);
    CHECK_THROWS_AS(render_template("{extra:sync}\n", "f", sig, {}), ConfigError);
    CHECK_THROWS_AS(render_template("{param_name}\n", "f", sig, {}), ConfigError);
    CHECK_THROWS_AS(render_template("broken {placeholder\n", "f", sig, {}), ConfigError);
}

TEST_CASE("generate_hook: condition match, ignore, default, unknown") {
    TemplateSet tset;
    tset.add("trampoline", "t {symbol}\n");
    tset.add("error-stub", "stub {symbol}\n");
    tset.add("guard", "guard {symbol}\n");

    HookConfig cfg = HookConfig::parse(
        "strategy s\nhook cudaLaunch* guard\nignore cudaGet*\ndefault error\n");
    Signature sig{"status_t", {}};

    auto hooked = generate_hook("cudaLaunchKernel", &sig, cfg, tset);
    CHECK(hooked.behavior == HookBehavior::StrategyHook);
    CHECK(hooked.template_id == "guard");
    CHECK(hooked.source == "guard cudaLaunchKernel\n");

    auto ignored = generate_hook("cudaGetDevice", &sig, cfg, tset);
    CHECK(ignored.behavior == HookBehavior::Trampoline);

    auto stubbed = generate_hook("cudaMemset", &sig, cfg, tset);
    CHECK(stubbed.behavior == HookBehavior::ErrorStub);

    // Unknown signature: always a stub, even though the condition matches.
    auto unknown = generate_hook("cudaLaunchKernel_ptsz", nullptr, cfg, tset);
    CHECK(unknown.behavior == HookBehavior::ErrorStub);
    CHECK(unknown.source == "stub cudaLaunchKernel_ptsz\n");
}

TEST_CASE("a condition naming a missing template is a config error") {
    TemplateSet tset;
    tset.add("trampoline", "t\n");
    tset.add("error-stub", "s\n");
    HookConfig cfg = HookConfig::parse("strategy s\nhook * no-such-template\n");
    Signature sig{"int", {}};
    CHECK_THROWS_AS(generate_hook("f", &sig, cfg, tset), ConfigError);
}

TEST_CASE("first matching condition wins") {
    TemplateSet tset;
    tset.add("trampoline", "t\n");
    tset.add("error-stub", "s\n");
    tset.add("first", "first {symbol}\n");
    tset.add("second", "second {symbol}\n");
    HookConfig cfg =
        HookConfig::parse("strategy s\nhook cuda* first\nhook cudaMalloc second\n");
    Signature sig{"int", {}};
    auto e = generate_hook("cudaMalloc", &sig, cfg, tset);
    CHECK(e.template_id == "first");
}

TEST_CASE("assembly requires exactly full coverage of the export list") {
    std::vector<GeneratedEntry> entries;
    for (const char* s : {"a", "b", "c"}) {
        GeneratedEntry e;
        e.symbol = s;
        e.behavior = HookBehavior::Trampoline;
        entries.push_back(e);
    }

    HookTable full = assemble_library(entries, {"a", "b", "c"});
    CHECK(full.size() == 3);

    try {
        assemble_library(entries, {"a", "b", "c", "d", "e"});
        FAIL("expected CoverageError");
    } catch (const CoverageError& e) {
        CHECK(e.missing() == std::vector<std::string>{"d", "e"});
    }
}

TEST_CASE("count_loc skips blanks and both comment styles") {
    CHECK(count_loc("") == 0);
    std::string file;
    for (int i = 0; i < 7; ++i) file += "line" + std::to_string(i) + "\n";
    file += "# comment\n// comment\n\n";
    CHECK(count_loc(file) == 7);
}

TEST_CASE("built-in generation covers all forty exports with the expected split") {
    HookBundle synced = builtin_bundle("synced");
    CHECK(synced.strategy == "synced");
    CHECK(synced.table.size() == 40);

    int hooks = 0, tramps = 0, stubs = 0;
    for (const auto& e : synced.table.entries()) {
        switch (e.behavior) {
            case HookBehavior::StrategyHook: ++hooks; break;
            case HookBehavior::Trampoline: ++tramps; break;
            case HookBehavior::ErrorStub: ++stubs; break;
        }
    }
    CHECK(hooks == 8);   // two launch entries + six declared copy variants
    CHECK(tramps == 25);
    CHECK(stubs == 7);   // two undeclared variants + five unmatched symbols

    const HookEntry* launch = synced.table.find("cudaLaunchKernel");
    REQUIRE(launch != nullptr);
    CHECK(launch->behavior == HookBehavior::StrategyHook);
    CHECK(launch->template_id == "synced-launch");

    CHECK(synced.table.find("cudaLaunchKernel_ptsz")->behavior == HookBehavior::ErrorStub);
    CHECK(synced.table.find("cudaMemcpy_ptds")->behavior == HookBehavior::ErrorStub);
    CHECK(synced.table.find("cudaGetDevice")->behavior == HookBehavior::Trampoline);
}

TEST_CASE("hand-written template lines amplify more than tenfold") {
    for (const char* strategy : {"callback", "synced", "worker"}) {
        HookBundle b = builtin_bundle(strategy);
        INFO("strategy ", strategy, ": generated ", b.loc.generated, " templates ",
             b.loc.templates);
        CHECK(b.loc.templates > 0);
        CHECK(b.loc.generated > 10 * b.loc.templates);
    }
}

TEST_CASE("regeneration from identical inputs is byte-identical") {
    HookBundle a = builtin_bundle("worker");
    HookBundle b = builtin_bundle("worker");
    CHECK(a.table.to_json(a.strategy) == b.table.to_json(b.strategy));
    REQUIRE(a.entries.size() == b.entries.size());
    for (std::size_t i = 0; i < a.entries.size(); ++i) {
        CHECK(a.entries[i].symbol == b.entries[i].symbol);
        CHECK(a.entries[i].source == b.entries[i].source);
    }
}

TEST_CASE("changing only the strategy config never alters trampoline entries") {
    HookBundle none = builtin_bundle("none");
    HookBundle callback = builtin_bundle("callback");
    HookBundle synced = builtin_bundle("synced");
    HookBundle worker = builtin_bundle("worker");

    auto source_of = [](const HookBundle& b, const std::string& sym) -> const GeneratedEntry& {
        for (const auto& e : b.entries)
            if (e.symbol == sym) return e;
        throw std::logic_error("missing entry " + sym);
    };

    for (const char* sym : {"cudaGetDevice", "cudaMalloc", "cudaStreamCreate",
                            "cudaGetLastError", "__cudaRegisterFunction"}) {
        const auto& n = source_of(none, sym);
        REQUIRE(n.behavior == HookBehavior::Trampoline);
        for (const HookBundle* b : {&callback, &synced, &worker}) {
            const auto& e = source_of(*b, sym);
            CHECK(e.behavior == HookBehavior::Trampoline);
            CHECK(e.source == n.source);
        }
    }
}

TEST_CASE("hook tables round-trip through json preserving order") {
    HookBundle b = builtin_bundle("callback");
    std::string json = b.table.to_json(b.strategy);
    HookTable back = HookTable::from_json(json);
    REQUIRE(back.size() == b.table.size());
    for (std::size_t i = 0; i < back.entries().size(); ++i) {
        CHECK(back.entries()[i].symbol == b.table.entries()[i].symbol);
        CHECK(back.entries()[i].behavior == b.table.entries()[i].behavior);
        CHECK(back.entries()[i].template_id == b.table.entries()[i].template_id);
    }
}

TEST_CASE("write_bundle emits the table and one listing per symbol") {
    TempDir dir;
    HookBundle b = builtin_bundle("synced");
    auto written = write_bundle(b, dir.path.string());
    CHECK(written.size() == 41);  // hooktable.json + 40 listings
    CHECK(fs::exists(dir.path / "hooktable.json"));
    CHECK(fs::exists(dir.path / "src" / "cudaLaunchKernel.hook"));

    std::string json = slurp_file((dir.path / "hooktable.json").string());
    CHECK(HookTable::from_json(json).size() == 40);

    std::string listing = slurp_file((dir.path / "src" / "cudaLaunchKernel.hook").string());
    CHECK(listing.find("lock_acquire(GPU_LOCK)") != std::string::npos);
    CHECK(listing.find("wait device_idle") != std::string::npos);
}

TEST_CASE("template directories load by file stem") {
    TempDir dir;
    write_file(dir.path / "alpha.tmpl", "A {symbol}\n");
    write_file(dir.path / "beta.tmpl", "B\n");
    write_file(dir.path / "notes.txt", "ignored\n");

    TemplateSet set = load_templates_dir(dir.path.string());
    CHECK(set.find("alpha") != nullptr);
    CHECK(set.find("beta") != nullptr);
    CHECK(set.find("notes") == nullptr);

    CHECK_THROWS_AS(load_templates_dir((dir.path / "missing").string()), IoError);
}

TEST_CASE("duplicate template ids are rejected") {
    TemplateSet set;
    set.add("x", "1\n");
    CHECK_THROWS_AS(set.add("x", "2\n"), ConfigError);
}

TEST_CASE("built-in assets expose the four strategies") {
    for (const char* s : {"none", "callback", "synced", "worker"}) {
        CHECK_FALSE(assets::builtin_config(s).empty());
        TemplateSet set = assets::builtin_templates(s);
        CHECK(set.find("trampoline") != nullptr);
        CHECK(set.find("error-stub") != nullptr);
    }
    CHECK_THROWS_AS(assets::builtin_templates("bogus"), ConfigError);
    CHECK_THROWS_AS(assets::text("no/such/key"), IoError);
}
