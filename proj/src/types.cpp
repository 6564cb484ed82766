#include "cook/types.hpp"

#include <cstring>

namespace cook {

std::vector<std::byte> encode_arg_blob(const std::vector<std::byte>& payload) {
    if (payload.size() > 0xffffffffu)
        throw ArgLayoutError("argument payload too large to encode");
    std::uint32_t len = static_cast<std::uint32_t>(payload.size());
    std::vector<std::byte> out(4 + payload.size());
    std::memcpy(out.data(), &len, 4);
    if (!payload.empty())
        std::memcpy(out.data() + 4, payload.data(), payload.size());
    return out;
}

std::vector<std::byte> decode_arg_blob(ArgView blob) {
    if (blob.size < 4)
        throw ArgLayoutError("argument blob shorter than its length prefix");
    std::uint32_t len = 0;
    std::memcpy(&len, blob.data, 4);
    if (blob.size != 4 + static_cast<std::size_t>(len))
        throw ArgLayoutError("argument blob length prefix disagrees with buffer size");
    return std::vector<std::byte>(blob.data + 4, blob.data + 4 + len);
}

std::vector<std::byte> copy_args_by_layout(ArgView blob, const ArgLayout& layout) {
    std::vector<std::byte> payload = decode_arg_blob(blob);
    if (payload.size() != layout.total_size())
        throw ArgLayoutError("argument payload does not match registered layout size");
    std::vector<std::byte> out;
    out.reserve(payload.size());
    std::size_t off = 0;
    for (std::size_t field : layout.field_sizes) {
        out.insert(out.end(), payload.begin() + off, payload.begin() + off + field);
        off += field;
    }
    return out;
}

std::uint64_t hash_bytes(const std::byte* data, std::size_t size) {
    std::uint64_t h = 1469598103934665603ull;
    for (std::size_t i = 0; i < size; ++i) {
        h ^= static_cast<std::uint64_t>(data[i]);
        h *= 1099511628211ull;
    }
    return h;
}

}  // namespace cook
