#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <string>
#include <string_view>
#include <type_traits>

#include "ragdesk/common.hpp"

namespace ragdesk {

// Snapshots are little-endian and written with memcpy, so the host must be too.
static_assert(std::endian::native == std::endian::little);

class BinaryWriter {
public:
    template <typename T>
        requires std::is_arithmetic_v<T>
    void put(T value) {
        char buf[sizeof(T)];
        std::memcpy(buf, &value, sizeof(T));
        out_.append(buf, sizeof(T));
    }

    void put_string(std::string_view s) {
        put<std::uint64_t>(s.size());
        out_.append(s);
    }

    void put_bytes(const void* data, std::size_t size) {
        out_.append(static_cast<const char*>(data), size);
    }

    void put_magic(std::string_view magic) { out_.append(magic); }

    const std::string& bytes() const noexcept { return out_; }
    std::string take() noexcept { return std::move(out_); }

private:
    std::string out_;
};

class BinaryReader {
public:
    explicit BinaryReader(std::string_view data) : data_(data) {}

    template <typename T>
        requires std::is_arithmetic_v<T>
    T get() {
        require(sizeof(T));
        T value;
        std::memcpy(&value, data_.data() + pos_, sizeof(T));
        pos_ += sizeof(T);
        return value;
    }

    std::string get_string() {
        const auto size = get<std::uint64_t>();
        require(size);
        std::string s(data_.substr(pos_, size));
        pos_ += size;
        return s;
    }

    void get_bytes(void* out, std::size_t size) {
        require(size);
        std::memcpy(out, data_.data() + pos_, size);
        pos_ += size;
    }

    void expect_magic(std::string_view magic, std::string_view what) {
        if (data_.size() - pos_ < magic.size() || data_.substr(pos_, magic.size()) != magic) {
            throw Error(ErrorCode::corrupt_data, std::string(what) + ": bad magic");
        }
        pos_ += magic.size();
    }

    bool at_end() const noexcept { return pos_ == data_.size(); }
    std::size_t remaining() const noexcept { return data_.size() - pos_; }

private:
    void require(std::size_t n) const {
        if (data_.size() - pos_ < n) {
            throw Error(ErrorCode::corrupt_data, "snapshot truncated");
        }
    }

    std::string_view data_;
    std::size_t pos_ = 0;
};

}  // namespace ragdesk
