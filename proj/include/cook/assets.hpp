#pragma once

#include <map>
#include <string>
#include <vector>

#include "cook/toolchain.hpp"

namespace cook {
namespace assets {

// Every file under the project's assets/ tree, embedded at build time and
// keyed by its path relative to that directory (e.g. "configs/synced.cfg").
const std::map<std::string, std::string>& files();

// Content of one embedded file; throws IoError when the key is unknown.
const std::string& text(const std::string& key);

// Keys that start with `prefix`, in lexicographic order.
std::vector<std::string> keys_under(const std::string& prefix);

// The shipped hook-template set for one strategy ("none", "callback",
// "synced", "worker"); throws ConfigError for anything else.
toolchain::TemplateSet builtin_templates(const std::string& strategy);

// The shipped hook configuration text for one strategy; same names.
const std::string& builtin_config(const std::string& strategy);

}  // namespace assets
}  // namespace cook
