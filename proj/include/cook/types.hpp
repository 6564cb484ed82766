#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "cook/errors.hpp"

namespace cook {

using Cycles = std::uint64_t;
using AppId = int;
using KernelId = int;
using OpId = std::int64_t;
using StreamId = int;

constexpr int kMaxThreadsPerBlock = 1024;

// Launch geometry at block granularity. Thread count only matters for
// validation; the timing model charges whole blocks.
struct GridShape {
    int blocks = 1;
    int threads_per_block = 1;

    bool valid() const {
        return blocks >= 1 && threads_per_block >= 1 &&
               threads_per_block <= kMaxThreadsPerBlock;
    }
};

enum class CopyDir { HostToDevice, DeviceToHost, DeviceToDevice };

struct CopySpec {
    std::size_t size_bytes = 0;
    CopyDir dir = CopyDir::HostToDevice;
};

// Field sizes of a kernel's launch arguments, in order. Registered once per
// kernel; deferred launch paths copy argument blobs field by field against
// this description.
struct ArgLayout {
    std::vector<std::size_t> field_sizes;

    std::size_t total_size() const {
        std::size_t n = 0;
        for (auto s : field_sizes) n += s;
        return n;
    }

    bool operator==(const ArgLayout& o) const { return field_sizes == o.field_sizes; }
};

// Non-owning view of a caller's argument buffer. Whoever needs the bytes
// after the call returns has to copy them; the buffer may be reused or
// freed by the caller immediately afterwards.
struct ArgView {
    const std::byte* data = nullptr;
    std::size_t size = 0;
};

// Wire form of an argument blob: u32 payload length, then the payload.
std::vector<std::byte> encode_arg_blob(const std::vector<std::byte>& payload);

// Validates the length prefix and returns the payload bytes.
// Throws ArgLayoutError on a truncated or inconsistent blob.
std::vector<std::byte> decode_arg_blob(ArgView blob);

// Copies one blob field by field per `layout`. The payload must be exactly
// layout.total_size() bytes long.
std::vector<std::byte> copy_args_by_layout(ArgView blob, const ArgLayout& layout);

// FNV-1a, used to fingerprint argument payloads in op records so tests can
// tell whether a deferred launch saw the bytes present at call time.
std::uint64_t hash_bytes(const std::byte* data, std::size_t size);

}  // namespace cook
