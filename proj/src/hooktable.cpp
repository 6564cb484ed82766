#include "cook/hooktable.hpp"

#include "json.hpp"

namespace cook {

const char* to_string(HookBehavior b) {
    switch (b) {
        case HookBehavior::StrategyHook: return "strategy-hook";
        case HookBehavior::Trampoline: return "trampoline";
        case HookBehavior::ErrorStub: return "error-stub";
    }
    return "?";
}

HookBehavior hook_behavior_from_string(const std::string& s) {
    if (s == "strategy-hook") return HookBehavior::StrategyHook;
    if (s == "trampoline") return HookBehavior::Trampoline;
    if (s == "error-stub") return HookBehavior::ErrorStub;
    throw ConfigError("unknown hook behavior: " + s);
}

void HookTable::add(HookEntry entry) {
    if (index_.count(entry.symbol))
        throw ConfigError("duplicate hook table entry for symbol " + entry.symbol);
    index_[entry.symbol] = entries_.size();
    entries_.push_back(std::move(entry));
}

const HookEntry* HookTable::find(const std::string& symbol) const {
    auto it = index_.find(symbol);
    return it == index_.end() ? nullptr : &entries_[it->second];
}

std::string HookTable::to_json(const std::string& strategy) const {
    nlohmann::ordered_json j;
    if (!strategy.empty()) j["strategy"] = strategy;
    j["symbol_count"] = entries_.size();
    nlohmann::ordered_json syms = nlohmann::ordered_json::object();
    for (const auto& e : entries_) {
        nlohmann::ordered_json entry;
        entry["behavior"] = to_string(e.behavior);
        if (e.behavior == HookBehavior::StrategyHook) entry["template"] = e.template_id;
        syms[e.symbol] = std::move(entry);
    }
    j["symbols"] = std::move(syms);
    return j.dump(2) + "\n";
}

HookTable HookTable::from_json(const std::string& text) {
    nlohmann::ordered_json j;
    try {
        j = nlohmann::ordered_json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("hook table json is malformed: ") + e.what());
    }
    if (!j.contains("symbols") || !j["symbols"].is_object())
        throw ConfigError("hook table json lacks a symbols object");
    HookTable table;
    for (auto& [symbol, entry] : j["symbols"].items()) {
        HookEntry e;
        e.symbol = symbol;
        e.behavior = hook_behavior_from_string(entry.at("behavior").get<std::string>());
        if (entry.contains("template")) e.template_id = entry["template"].get<std::string>();
        table.add(std::move(e));
    }
    return table;
}

}  // namespace cook
