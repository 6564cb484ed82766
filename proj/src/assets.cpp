#include "cook/assets.hpp"

#include "cook/errors.hpp"

namespace cook {
namespace assets {

const std::string& text(const std::string& key) {
    const auto& table = files();
    auto it = table.find(key);
    if (it == table.end()) throw IoError("no embedded asset named '" + key + "'");
    return it->second;
}

std::vector<std::string> keys_under(const std::string& prefix) {
    std::vector<std::string> out;
    for (const auto& [key, _] : files())
        if (key.rfind(prefix, 0) == 0) out.push_back(key);
    return out;
}

toolchain::TemplateSet builtin_templates(const std::string& strategy) {
    std::string prefix = "templates/" + strategy + "/";
    std::vector<std::string> keys = keys_under(prefix);
    if (keys.empty())
        throw ConfigError("no builtin templates for strategy '" + strategy + "'");
    toolchain::TemplateSet set;
    for (const std::string& key : keys) {
        std::string name = key.substr(prefix.size());
        static const std::string kExt = ".tmpl";
        if (name.size() > kExt.size() &&
            name.compare(name.size() - kExt.size(), kExt.size(), kExt) == 0)
            set.add(name.substr(0, name.size() - kExt.size()), text(key));
    }
    return set;
}

const std::string& builtin_config(const std::string& strategy) {
    return text("configs/" + strategy + ".cfg");
}

}  // namespace assets
}  // namespace cook
