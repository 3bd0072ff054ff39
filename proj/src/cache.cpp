#include "depthpipe/cache.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>

#include "depthpipe/errors.hpp"

namespace depthpipe {

namespace {
constexpr std::uint64_t kFnvPrime = 0x100000001b3ull;
}

ContentHash& ContentHash::update(std::span<const std::uint8_t> bytes) {
    std::uint64_t h = state_;
    for (std::uint8_t b : bytes) {
        h ^= b;
        h *= kFnvPrime;
    }
    state_ = h;
    return *this;
}

ContentHash& ContentHash::update(const std::string& s) {
    update(static_cast<std::uint64_t>(s.size()));
    return update({reinterpret_cast<const std::uint8_t*>(s.data()), s.size()});
}

ContentHash& ContentHash::update(std::uint64_t v) {
    std::uint8_t buf[8];
    for (int i = 0; i < 8; ++i) buf[i] = static_cast<std::uint8_t>((v >> (8 * i)) & 0xff);
    return update({buf, 8});
}

ContentHash& ContentHash::update(double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, 8);
    return update(bits);
}

std::string ContentHash::hex() const {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(state_));
    return buf;
}

CacheStore::CacheStore(std::filesystem::path root) : root_(std::move(root)) {
    std::error_code ec;
    std::filesystem::create_directories(root_, ec);
    if (ec) throw DataError("cannot create cache directory " + root_.string() + ": " + ec.message());
}

std::filesystem::path CacheStore::entry_path(const std::string& key) const {
    return root_ / key.substr(0, 2) / (key + ".bin");
}

std::optional<std::vector<std::uint8_t>> CacheStore::get(const std::string& key) {
    std::ifstream in(entry_path(key), std::ios::binary);
    if (!in) {
        ++misses_;
        return std::nullopt;
    }
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    if (!in.eof() && in.fail()) throw DataError("cache read failed: " + entry_path(key).string());
    ++hits_;
    return bytes;
}

void CacheStore::put(const std::string& key, std::span<const std::uint8_t> bytes) {
    const std::filesystem::path dest = entry_path(key);
    std::error_code ec;
    std::filesystem::create_directories(dest.parent_path(), ec);
    if (ec)
        throw DataError("cannot create cache directory " + dest.parent_path().string() + ": " +
                        ec.message());
    // Counter-suffixed temp name so concurrent writers of the same key
    // never collide; the final rename is atomic.
    const std::filesystem::path tmp =
        dest.string() + ".tmp" + std::to_string(tmp_counter_.fetch_add(1));
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw DataError("cannot open cache entry for write: " + tmp.string());
        out.write(reinterpret_cast<const char*>(bytes.data()),
                  static_cast<std::streamsize>(bytes.size()));
        if (!out) throw DataError("cache write failed: " + tmp.string());
    }
    std::filesystem::rename(tmp, dest, ec);
    if (ec) throw DataError("cache rename failed: " + dest.string() + ": " + ec.message());
    ++puts_;
}

}  // namespace depthpipe
