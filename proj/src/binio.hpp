#ifndef DCACRN_BINIO_HPP
#define DCACRN_BINIO_HPP

#include <bit>
#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include "error.hpp"

namespace dcacrn {

/// Little-endian binary writer over an output stream.
class BinWriter {
public:
    explicit BinWriter(std::ostream& os) : os_(os) {}

    void u32(std::uint32_t v) { write_le(v); }
    void u64(std::uint64_t v) { write_le(v); }
    void i32(std::int32_t v) { write_le(static_cast<std::uint32_t>(v)); }
    void f32(float v) { write_le(std::bit_cast<std::uint32_t>(v)); }
    void bytes(const char* data, std::size_t n) { os_.write(data, static_cast<std::streamsize>(n)); }
    void str(const std::string& s) {
        u32(static_cast<std::uint32_t>(s.size()));
        bytes(s.data(), s.size());
    }

private:
    template <typename T>
    void write_le(T v) {
        char buf[sizeof(T)];
        for (std::size_t i = 0; i < sizeof(T); ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xff);
        os_.write(buf, sizeof(T));
    }
    std::ostream& os_;
};

/// Little-endian binary reader that reports the byte offset of any failure.
class BinReader {
public:
    BinReader(std::istream& is, std::string context) : is_(is), context_(std::move(context)) {}

    std::size_t offset() const { return offset_; }

    std::uint32_t u32(const char* what) { return read_le<std::uint32_t>(what); }
    std::uint64_t u64(const char* what) { return read_le<std::uint64_t>(what); }
    std::int32_t i32(const char* what) { return static_cast<std::int32_t>(read_le<std::uint32_t>(what)); }
    float f32(const char* what) { return std::bit_cast<float>(read_le<std::uint32_t>(what)); }

    void bytes(char* out, std::size_t n, const char* what) {
        is_.read(out, static_cast<std::streamsize>(n));
        if (static_cast<std::size_t>(is_.gcount()) != n) fail(what, n);
        offset_ += n;
    }

    std::string str(const char* what) {
        const std::uint32_t n = u32(what);
        std::string s(n, '\0');
        if (n > 0) bytes(s.data(), n, what);
        return s;
    }

    bool at_eof() {
        is_.peek();
        return is_.eof();
    }

    [[noreturn]] void fail_here(const std::string& why) {
        throw DataError(context_ + ": " + why + " at offset " + std::to_string(offset_));
    }

private:
    template <typename T>
    T read_le(const char* what) {
        char buf[sizeof(T)];
        is_.read(buf, sizeof(T));
        if (static_cast<std::size_t>(is_.gcount()) != sizeof(T)) fail(what, sizeof(T));
        T v = 0;
        for (std::size_t i = 0; i < sizeof(T); ++i)
            v |= static_cast<T>(static_cast<unsigned char>(buf[i])) << (8 * i);
        offset_ += sizeof(T);
        return v;
    }

    [[noreturn]] void fail(const char* what, std::size_t wanted) {
        throw DataError(context_ + ": truncated while reading " + what + " (" + std::to_string(wanted) +
                        " bytes) at offset " + std::to_string(offset_));
    }

    std::istream& is_;
    std::string context_;
    std::size_t offset_ = 0;
};

} // namespace dcacrn

#endif // DCACRN_BINIO_HPP
