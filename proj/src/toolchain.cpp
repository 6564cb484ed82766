#include "cook/toolchain.hpp"

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "cook/errors.hpp"

namespace cook {
namespace toolchain {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

bool is_comment(const std::string& trimmed) {
    return trimmed.empty() || trimmed[0] == '#' ||
           (trimmed.size() >= 2 && trimmed[0] == '/' && trimmed[1] == '/');
}

std::vector<std::string> split_ws(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream in(s);
    std::string tok;
    while (in >> tok) out.push_back(tok);
    return out;
}

bool valid_identifier(const std::string& s) {
    if (s.empty()) return false;
    for (char c : s)
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
    return !std::isdigit(static_cast<unsigned char>(s[0]));
}

}  // namespace

std::string slurp_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read file: " + path);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

std::vector<std::string> extract_symbols(const std::string& exports_text) {
    std::vector<std::string> out;
    std::set<std::string> seen;
    std::istringstream in(exports_text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string t = trim(line);
        if (is_comment(t)) continue;
        if (!valid_identifier(t))
            throw ParseError("export list entry is not a symbol name: '" + t + "'",
                             lineno);
        if (seen.insert(t).second) out.push_back(t);
    }
    if (out.empty()) throw EmptyInterfaceError("export list contains no symbols");
    return out;
}

std::vector<Declaration> parse_interface(const std::string& interface_text) {
    std::vector<Declaration> out;
    std::istringstream in(interface_text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string t = trim(line);
        if (is_comment(t)) continue;

        std::size_t open = t.find('(');
        std::size_t close = t.rfind(')');
        if (open == std::string::npos || close == std::string::npos || close < open ||
            close != t.size() - 1)
            throw ParseError("malformed declaration: '" + t + "'", lineno);

        std::vector<std::string> head = split_ws(t.substr(0, open));
        if (head.size() != 2 || !valid_identifier(head[0]) || !valid_identifier(head[1]))
            throw ParseError("declaration needs '<return_type> <symbol>(...)': '" + t + "'",
                             lineno);

        Declaration decl;
        decl.sig.return_type = head[0];
        decl.symbol = head[1];

        std::string inner = trim(t.substr(open + 1, close - open - 1));
        if (!inner.empty() && inner != "void") {
            std::istringstream plist(inner);
            std::string piece;
            while (std::getline(plist, piece, ',')) {
                std::vector<std::string> parts = split_ws(piece);
                if (parts.size() != 2 || !valid_identifier(parts[0]) ||
                    !valid_identifier(parts[1]))
                    throw ParseError("malformed parameter '" + trim(piece) + "' in '" + t +
                                         "'",
                                     lineno);
                decl.sig.params.push_back(Param{parts[0], parts[1]});
            }
        }
        for (const Declaration& prev : out)
            if (prev.symbol == decl.symbol)
                throw ParseError("duplicate declaration of '" + decl.symbol + "'", lineno);
        out.push_back(std::move(decl));
    }
    return out;
}

const Declaration* find_declaration(const std::string& symbol,
                                    const std::vector<Declaration>& defs) {
    for (const Declaration& d : defs)
        if (d.symbol == symbol) return &d;
    return nullptr;
}

bool glob_match(const std::string& pattern, const std::string& name) {
    // Iterative star-backtracking matcher.
    std::size_t p = 0, n = 0;
    std::size_t star = std::string::npos, mark = 0;
    while (n < name.size()) {
        if (p < pattern.size() && (pattern[p] == '?' || pattern[p] == name[n])) {
            ++p;
            ++n;
        } else if (p < pattern.size() && pattern[p] == '*') {
            star = p++;
            mark = n;
        } else if (star != std::string::npos) {
            p = star + 1;
            n = ++mark;
        } else {
            return false;
        }
    }
    while (p < pattern.size() && pattern[p] == '*') ++p;
    return p == pattern.size();
}

HookConfig HookConfig::parse(const std::string& text) {
    HookConfig cfg;
    bool default_seen = false;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string t = trim(line);
        if (is_comment(t)) continue;
        std::vector<std::string> tok = split_ws(t);

        if (tok[0] == "strategy") {
            if (tok.size() != 2)
                throw ParseError("'strategy' takes exactly one name", lineno);
            if (!cfg.strategy.empty())
                throw ParseError("duplicate 'strategy' directive", lineno);
            cfg.strategy = tok[1];
        } else if (tok[0] == "hook") {
            if (tok.size() < 3)
                throw ParseError("'hook' needs a pattern and a template id", lineno);
            HookCondition cond;
            cond.pattern = tok[1];
            cond.template_id = tok[2];
            for (std::size_t i = 3; i < tok.size(); ++i) {
                std::size_t eq = tok[i].find('=');
                if (eq == std::string::npos || eq == 0)
                    throw ParseError("hook extra must be key=value, got '" + tok[i] + "'",
                                     lineno);
                cond.extras[tok[i].substr(0, eq)] = tok[i].substr(eq + 1);
            }
            cfg.conditions.push_back(std::move(cond));
        } else if (tok[0] == "ignore") {
            if (tok.size() != 2)
                throw ParseError("'ignore' takes exactly one pattern", lineno);
            cfg.ignore_patterns.push_back(tok[1]);
        } else if (tok[0] == "default") {
            if (tok.size() != 2 || tok[1] != "error")
                throw ParseError("only 'default error' is supported", lineno);
            default_seen = true;
        } else {
            throw ParseError("unknown directive '" + tok[0] + "'", lineno);
        }
    }
    if (cfg.strategy.empty())
        throw ParseError("config never names its strategy", lineno == 0 ? 1 : lineno);
    (void)default_seen;  // the default is the error stub whether stated or not
    return cfg;
}

void TemplateSet::add(const std::string& id, const std::string& body) {
    if (templates_.count(id))
        throw ConfigError("duplicate template id '" + id + "'");
    templates_[id] = body;
}

const std::string* TemplateSet::find(const std::string& id) const {
    auto it = templates_.find(id);
    return it == templates_.end() ? nullptr : &it->second;
}

TemplateSet load_templates_dir(const std::string& dir) {
    namespace fs = std::filesystem;
    TemplateSet set;
    std::error_code ec;
    if (!fs::is_directory(dir, ec))
        throw IoError("template directory not found: " + dir);
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".tmpl")
            files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    for (const fs::path& f : files) set.add(f.stem().string(), slurp_file(f.string()));
    return set;
}

namespace {

std::string join_params(const Signature& sig) {
    if (sig.params.empty()) return "void";
    std::string out;
    for (std::size_t i = 0; i < sig.params.size(); ++i) {
        if (i) out += ", ";
        out += sig.params[i].type + " " + sig.params[i].name;
    }
    return out;
}

std::string join_param_names(const Signature& sig) {
    std::string out;
    for (std::size_t i = 0; i < sig.params.size(); ++i) {
        if (i) out += ", ";
        out += sig.params[i].name;
    }
    return out;
}

// Placeholder keys are identifier-shaped (plus ':' for extras); any other
// brace is literal text, so templates can freely emit C-style bodies.
bool placeholder_shaped(const std::string& s) {
    if (s.empty()) return false;
    if (!std::isalpha(static_cast<unsigned char>(s[0])) && s[0] != '_') return false;
    for (char c : s)
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != ':')
            return false;
    return true;
}

// Replaces {placeholder} occurrences in one line. `per_param` adds the
// param_* keys valid inside @each_param expansions.
std::string substitute(const std::string& line, const std::string& symbol,
                       const Signature& sig,
                       const std::map<std::string, std::string>& extras,
                       const Param* param, std::size_t param_index) {
    std::string out;
    std::size_t i = 0;
    while (i < line.size()) {
        if (line[i] != '{') {
            out += line[i++];
            continue;
        }
        std::size_t close = line.find('}', i);
        if (close == std::string::npos) {
            // A key left open is an authoring mistake; a dangling literal
            // brace (e.g. a block opener at end of line) is not.
            if (placeholder_shaped(line.substr(i + 1)))
                throw ConfigError("unterminated placeholder in template line: " +
                                  line);
            out += line[i++];
            continue;
        }
        std::string key = line.substr(i + 1, close - i - 1);
        if (!placeholder_shaped(key)) {
            out += line[i++];
            continue;
        }
        if (key == "symbol") {
            out += symbol;
        } else if (key == "return_type") {
            out += sig.return_type;
        } else if (key == "params") {
            out += join_params(sig);
        } else if (key == "param_names") {
            out += join_param_names(sig);
        } else if (key.rfind("extra:", 0) == 0) {
            std::string name = key.substr(6);
            auto it = extras.find(name);
            if (it == extras.end())
                throw ConfigError("template needs extra '" + name +
                                  "' which the hook condition does not provide");
            out += it->second;
        } else if (param && key == "param_type") {
            out += param->type;
        } else if (param && key == "param_name") {
            out += param->name;
        } else if (param && key == "param_index") {
            out += std::to_string(param_index);
        } else {
            throw ConfigError("unknown template placeholder {" + key + "}");
        }
        i = close + 1;
    }
    return out;
}

}  // namespace

std::string render_template(const std::string& body, const std::string& symbol,
                            const Signature& sig,
                            const std::map<std::string, std::string>& extras) {
    static const std::string kEach = "@each_param ";
    std::string out;
    std::istringstream in(body);
    std::string line;
    while (std::getline(in, line)) {
        if (line.rfind(kEach, 0) == 0) {
            std::string rest = line.substr(kEach.size());
            for (std::size_t i = 0; i < sig.params.size(); ++i) {
                out += substitute(rest, symbol, sig, extras, &sig.params[i], i);
                out += '\n';
            }
        } else {
            out += substitute(line, symbol, sig, extras, nullptr, 0);
            out += '\n';
        }
    }
    return out;
}

GeneratedEntry generate_hook(const std::string& symbol, const Signature* sig,
                             const HookConfig& config, const TemplateSet& templates) {
    GeneratedEntry entry;
    entry.symbol = symbol;

    auto render_with = [&](const std::string& template_id,
                           const std::map<std::string, std::string>& extras,
                           const Signature& s) {
        const std::string* body = templates.find(template_id);
        if (!body)
            throw ConfigError("hook condition references missing template '" +
                              template_id + "'");
        entry.template_id = template_id;
        entry.source = render_template(*body, symbol, s, extras);
    };

    if (!sig) {
        // No declaration found: the tool cannot render a typed hook, so the
        // symbol is stubbed out whatever the conditions say.
        entry.behavior = HookBehavior::ErrorStub;
        render_with("error-stub", {}, Signature{"unknown_t", {}});
        return entry;
    }

    for (const HookCondition& cond : config.conditions) {
        if (glob_match(cond.pattern, symbol)) {
            entry.behavior = HookBehavior::StrategyHook;
            render_with(cond.template_id, cond.extras, *sig);
            return entry;
        }
    }
    for (const std::string& pat : config.ignore_patterns) {
        if (glob_match(pat, symbol)) {
            entry.behavior = HookBehavior::Trampoline;
            render_with("trampoline", {}, *sig);
            return entry;
        }
    }
    entry.behavior = HookBehavior::ErrorStub;
    render_with("error-stub", {}, *sig);
    return entry;
}

int count_loc(const std::string& text) {
    int n = 0;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (!is_comment(trim(line))) ++n;
    }
    return n;
}

HookTable assemble_library(const std::vector<GeneratedEntry>& entries,
                           const std::vector<std::string>& exported) {
    std::map<std::string, const GeneratedEntry*> by_symbol;
    for (const GeneratedEntry& e : entries) by_symbol[e.symbol] = &e;

    std::vector<std::string> missing;
    for (const std::string& sym : exported)
        if (!by_symbol.count(sym)) missing.push_back(sym);
    if (!missing.empty()) {
        std::string what = "cannot assemble hook library, no entry for:";
        for (const std::string& m : missing) what += " " + m;
        throw CoverageError(what, std::move(missing));
    }

    HookTable table;
    for (const std::string& sym : exported) {
        const GeneratedEntry& e = *by_symbol.at(sym);
        HookEntry he;
        he.symbol = e.symbol;
        he.behavior = e.behavior;
        if (e.behavior == HookBehavior::StrategyHook) he.template_id = e.template_id;
        table.add(std::move(he));
    }
    return table;
}

HookBundle generate_all(const std::string& interface_text, const std::string& exports_text,
                        const std::string& config_text, const TemplateSet& templates) {
    std::vector<std::string> symbols = extract_symbols(exports_text);
    std::vector<Declaration> defs = parse_interface(interface_text);
    HookConfig config = HookConfig::parse(config_text);

    HookBundle bundle;
    bundle.strategy = config.strategy;
    for (const std::string& sym : symbols) {
        const Declaration* decl = find_declaration(sym, defs);
        bundle.entries.push_back(
            generate_hook(sym, decl ? &decl->sig : nullptr, config, templates));
    }
    bundle.table = assemble_library(bundle.entries, symbols);

    bundle.loc.config = count_loc(config_text);
    for (const auto& [id, body] : templates.all()) bundle.loc.templates += count_loc(body);
    for (const GeneratedEntry& e : bundle.entries) bundle.loc.generated += count_loc(e.source);
    return bundle;
}

std::vector<std::string> write_bundle(const HookBundle& bundle, const std::string& out_dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(fs::path(out_dir) / "src", ec);
    if (ec) throw IoError("cannot create output directory: " + out_dir);

    std::vector<std::string> written;
    auto emit = [&](const fs::path& path, const std::string& text) {
        std::ofstream out(path, std::ios::binary);
        if (!out) throw IoError("cannot write file: " + path.string());
        out << text;
        if (!out) throw IoError("write failed: " + path.string());
        written.push_back(path.string());
    };

    emit(fs::path(out_dir) / "hooktable.json", bundle.table.to_json(bundle.strategy));
    for (const GeneratedEntry& e : bundle.entries)
        emit(fs::path(out_dir) / "src" / (e.symbol + ".hook"), e.source);
    return written;
}

}  // namespace toolchain
}  // namespace cook
