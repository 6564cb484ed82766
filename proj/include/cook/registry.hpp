#pragma once

#include <map>
#include <string>

#include "cook/errors.hpp"
#include "cook/types.hpp"

namespace cook {

// Kernels an application has registered: name plus argument layout. Deferred
// launch paths need the layout to copy argument blobs before the caller's
// buffer goes away.
class KernelRegistry {
public:
    struct Info {
        std::string name;
        ArgLayout layout;
    };

    // Registering the same kernel twice with identical contents is a no-op;
    // disagreeing contents are a conflict.
    void add(KernelId id, const std::string& name, const ArgLayout& layout) {
        auto it = entries_.find(id);
        if (it != entries_.end()) {
            if (it->second.name != name || !(it->second.layout == layout))
                throw RegistryConflictError("kernel id " + std::to_string(id) +
                                            " re-registered with different name or layout");
            return;
        }
        entries_[id] = Info{name, layout};
    }

    const Info* find(KernelId id) const {
        auto it = entries_.find(id);
        return it == entries_.end() ? nullptr : &it->second;
    }

    const Info& lookup(KernelId id) const {
        const Info* info = find(id);
        if (!info) throw UnknownKernelError(id);
        return *info;
    }

    std::size_t size() const { return entries_.size(); }

private:
    std::map<KernelId, Info> entries_;
};

}  // namespace cook
