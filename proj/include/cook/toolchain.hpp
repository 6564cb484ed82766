#pragma once

#include <map>
#include <string>
#include <vector>

#include "cook/hooktable.hpp"

namespace cook {
namespace toolchain {

struct Param {
    std::string type;
    std::string name;
};

struct Signature {
    std::string return_type;
    std::vector<Param> params;
};

struct Declaration {
    std::string symbol;
    Signature sig;
};

// Reads an export list (one symbol per line, '#' comments) into a
// deduplicated, order-preserving symbol list.
// Throws EmptyInterfaceError when no symbols remain.
std::vector<std::string> extract_symbols(const std::string& exports_text);

// Parses interface declarations of the form
//     <return_type> <symbol>(<type> <name>, <type> <name>, ...)
// one per line; `(void)` and `()` both declare zero parameters. Blank lines
// and '#' comments are skipped. Throws ParseError carrying the 1-based line
// number of the first malformed declaration.
std::vector<Declaration> parse_interface(const std::string& interface_text);

// Exact-name lookup; nullptr when the symbol has no declaration (the symbol
// is then "unknown" and can only become an error stub).
const Declaration* find_declaration(const std::string& symbol,
                                    const std::vector<Declaration>& defs);

// Glob match with '*' (any run) and '?' (any one char) on symbol names.
bool glob_match(const std::string& pattern, const std::string& name);

// One `hook` directive: symbols matching `pattern` get the strategy hook
// rendered from `template_id`, with `extras` available as {extra:key}
// placeholders.
struct HookCondition {
    std::string pattern;
    std::string template_id;
    std::map<std::string, std::string> extras;
};

// Parsed hook configuration. Grammar, one directive per line:
//     strategy <name>
//     hook <pattern> <template_id> [key=value ...]
//     ignore <pattern>
//     default error
// Conditions apply in file order, first match wins; symbols matching no
// `hook` are checked against `ignore` patterns (trampoline on match) and
// fall back to the default behavior (always the error stub).
struct HookConfig {
    std::string strategy;
    std::vector<HookCondition> conditions;
    std::vector<std::string> ignore_patterns;

    static HookConfig parse(const std::string& text);
};

// Named template bodies. Two ids are reserved and must be present for
// generation: "trampoline" and "error-stub".
class TemplateSet {
public:
    void add(const std::string& id, const std::string& body);
    const std::string* find(const std::string& id) const;
    const std::map<std::string, std::string>& all() const { return templates_; }

private:
    std::map<std::string, std::string> templates_;
};

// Loads every "*.tmpl" file in a directory; the template id is the file
// name without the extension.
TemplateSet load_templates_dir(const std::string& dir);

// Instantiates a template body for one declared symbol. Placeholders:
//   {symbol} {return_type} {params} {param_names} {extra:<key>}
// A line starting with "@each_param " is repeated once per parameter with
// {param_type} {param_name} {param_index} substituted. Unknown placeholders
// and missing extras raise ConfigError.
std::string render_template(const std::string& body, const std::string& symbol,
                            const Signature& sig,
                            const std::map<std::string, std::string>& extras);

struct GeneratedEntry {
    std::string symbol;
    HookBehavior behavior = HookBehavior::ErrorStub;
    std::string template_id;  // template the source was rendered from
    std::string source;       // rendered pseudo-source listing
};

// Decides and renders one symbol's entry. `sig` is nullptr for symbols with
// no declaration; those always become error stubs. Throws ConfigError when
// a matched condition names a template the set does not contain.
GeneratedEntry generate_hook(const std::string& symbol, const Signature* sig,
                             const HookConfig& config, const TemplateSet& templates);

// Non-blank, non-comment ('#' or "//") line count of one text.
int count_loc(const std::string& text);

struct LocCounts {
    int config = 0;
    int templates = 0;
    int generated = 0;
};

struct HookBundle {
    std::string strategy;
    HookTable table;
    std::vector<GeneratedEntry> entries;  // export-list order
    LocCounts loc;
};

// Builds the dispatchable table from per-symbol entries, refusing assembly
// unless every exported symbol has exactly one entry.
// Throws CoverageError naming the uncovered symbols.
HookTable assemble_library(const std::vector<GeneratedEntry>& entries,
                           const std::vector<std::string>& exported);

// The whole generation pipeline: extract symbols, look up declarations,
// apply conditions, render, assemble and count. Deterministic: identical
// inputs produce a byte-identical bundle.
HookBundle generate_all(const std::string& interface_text, const std::string& exports_text,
                        const std::string& config_text, const TemplateSet& templates);

// Writes hooktable.json plus one rendered listing per symbol under
// `<out_dir>/src/`. Returns the paths written. Throws IoError.
std::vector<std::string> write_bundle(const HookBundle& bundle, const std::string& out_dir);

// Reads a whole file into a string; throws IoError.
std::string slurp_file(const std::string& path);

}  // namespace toolchain
}  // namespace cook
