#include <vector>

#include "doctest.h"

#include "cook/types.hpp"

using namespace cook;

namespace {

std::vector<std::byte> bytes_of(std::initializer_list<int> vals) {
    std::vector<std::byte> out;
    for (int v : vals) out.push_back(static_cast<std::byte>(v));
    return out;
}

ArgView view(const std::vector<std::byte>& b) { return ArgView{b.data(), b.size()}; }

}  // namespace

TEST_CASE("argument blobs round-trip through the wire encoding") {
    std::vector<std::byte> payload;
    for (int i = 0; i < 23; ++i) payload.push_back(static_cast<std::byte>(i * 7));

    auto blob = encode_arg_blob(payload);
    CHECK(blob.size() == payload.size() + 4);
    CHECK(decode_arg_blob(view(blob)) == payload);
}

TEST_CASE("empty payload encodes to just the length prefix") {
    auto blob = encode_arg_blob({});
    CHECK(blob.size() == 4);
    CHECK(decode_arg_blob(view(blob)).empty());
}

TEST_CASE("truncated or inconsistent blobs are rejected") {
    auto blob = encode_arg_blob(std::vector<std::byte>(8, std::byte{1}));

    auto short_blob = blob;
    short_blob.pop_back();
    CHECK_THROWS_AS(decode_arg_blob(view(short_blob)), ArgLayoutError);

    CHECK_THROWS_AS(decode_arg_blob(ArgView{blob.data(), 3}), ArgLayoutError);
    CHECK_THROWS_AS(decode_arg_blob(ArgView{nullptr, 0}), ArgLayoutError);

    auto long_blob = blob;
    long_blob.push_back(std::byte{0});
    CHECK_THROWS_AS(decode_arg_blob(view(long_blob)), ArgLayoutError);
}

TEST_CASE("field-wise copy reproduces the payload when the layout matches") {
    ArgLayout layout{{4, 8, 4}};
    auto payload = bytes_of({1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15, 16});
    auto blob = encode_arg_blob(payload);

    CHECK(copy_args_by_layout(view(blob), layout) == payload);
}

TEST_CASE("field-wise copy rejects a layout of the wrong total size") {
    ArgLayout layout{{4, 8}};  // 12 bytes declared
    auto payload = std::vector<std::byte>(16, std::byte{9});
    auto blob = encode_arg_blob(payload);

    CHECK_THROWS_AS(copy_args_by_layout(view(blob), layout), ArgLayoutError);
}

TEST_CASE("layout totals sum the field sizes") {
    CHECK(ArgLayout{{4, 4, 8}}.total_size() == 16);
    CHECK(ArgLayout{}.total_size() == 0);
}

TEST_CASE("payload fingerprints separate different blobs") {
    auto a = bytes_of({1, 2, 3});
    auto b = bytes_of({1, 2, 4});
    auto c = a;

    CHECK(hash_bytes(a.data(), a.size()) == hash_bytes(c.data(), c.size()));
    CHECK(hash_bytes(a.data(), a.size()) != hash_bytes(b.data(), b.size()));
    // Order matters.
    auto ab = bytes_of({1, 2});
    auto ba = bytes_of({2, 1});
    CHECK(hash_bytes(ab.data(), ab.size()) != hash_bytes(ba.data(), ba.size()));
}

TEST_CASE("grid validity bounds") {
    CHECK(GridShape{1, 1}.valid());
    CHECK(GridShape{200, 256}.valid());
    CHECK(GridShape{1, 1024}.valid());
    CHECK_FALSE(GridShape{0, 32}.valid());
    CHECK_FALSE(GridShape{-3, 32}.valid());
    CHECK_FALSE(GridShape{4, 0}.valid());
    CHECK_FALSE(GridShape{4, 1025}.valid());
}
