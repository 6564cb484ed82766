#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include "cook/errors.hpp"

namespace cook {

// What the dispatch layer does when a symbol is called.
enum class HookBehavior {
    StrategyHook,  // run the strategy hook bound to template_id
    Trampoline,    // pass through to the plain runtime behavior
    ErrorStub,     // raise UnhookedSymbolError
};

const char* to_string(HookBehavior b);
HookBehavior hook_behavior_from_string(const std::string& s);

struct HookEntry {
    std::string symbol;
    HookBehavior behavior = HookBehavior::ErrorStub;
    std::string template_id;  // only meaningful for StrategyHook
};

// Symbol -> behavior map produced by the generator and consumed by dispatch.
// Entries keep the export-list order so serializations are stable.
class HookTable {
public:
    void add(HookEntry entry);
    const HookEntry* find(const std::string& symbol) const;
    const std::vector<HookEntry>& entries() const { return entries_; }
    std::size_t size() const { return entries_.size(); }

    std::string to_json(const std::string& strategy = "") const;
    static HookTable from_json(const std::string& text);

private:
    std::vector<HookEntry> entries_;
    std::unordered_map<std::string, std::size_t> index_;
};

}  // namespace cook
