#pragma once

// Little-endian primitives shared by the binary file formats.

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "rrfnn/errors.hpp"

namespace rrfnn::byte_io {

static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);

template <class T>
T byteswap_if_big(T value) {
    if constexpr (std::endian::native == std::endian::big) {
        unsigned char bytes[sizeof(T)];
        std::memcpy(bytes, &value, sizeof(T));
        for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(bytes[i], bytes[sizeof(T) - 1 - i]);
        std::memcpy(&value, bytes, sizeof(T));
    }
    return value;
}

class Writer {
public:
    void bytes(std::string_view s) { buffer_.insert(buffer_.end(), s.begin(), s.end()); }

    template <class T>
    void put(T value) {
        value = byteswap_if_big(value);
        const auto* p = reinterpret_cast<const char*>(&value);
        buffer_.insert(buffer_.end(), p, p + sizeof(T));
    }

    const std::vector<char>& buffer() const noexcept { return buffer_; }

    /// Writes the buffer to `path`; throws IoError naming the path on failure.
    void save(const std::filesystem::path& path) const;

private:
    std::vector<char> buffer_;
};

class Reader {
public:
    explicit Reader(std::vector<char> data) : data_(std::move(data)) {}

    /// Reads a whole file; throws IoError naming the path on failure.
    static Reader open(const std::filesystem::path& path);

    std::size_t offset() const noexcept { return offset_; }
    std::size_t remaining() const noexcept { return data_.size() - offset_; }
    std::size_t size() const noexcept { return data_.size(); }

    void expect_magic(std::string_view magic, std::string_view what);
    /// True (and consumes it) if the next bytes equal `magic`.
    bool match_magic(std::string_view magic);

    template <class T>
    T get(std::string_view field) {
        if (remaining() < sizeof(T)) {
            throw FormatError("truncated file while reading " + std::string(field), offset_);
        }
        T value;
        std::memcpy(&value, data_.data() + offset_, sizeof(T));
        offset_ += sizeof(T);
        return byteswap_if_big(value);
    }

    /// Fails unless exactly `expected` bytes remain.
    void expect_payload(std::size_t expected) const;

private:
    std::vector<char> data_;
    std::size_t offset_ = 0;
};

}  // namespace rrfnn::byte_io
