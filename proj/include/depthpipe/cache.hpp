#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace depthpipe {

/// Incremental FNV-1a 64-bit hash. Strings and integers are
/// length/width-delimited so field boundaries cannot collide.
class ContentHash {
public:
    ContentHash& update(std::span<const std::uint8_t> bytes);
    ContentHash& update(const std::string& s);
    ContentHash& update(std::uint64_t v);
    ContentHash& update(double v);

    std::uint64_t value() const { return state_; }
    /// 16 lowercase hex digits.
    std::string hex() const;

private:
    std::uint64_t state_ = 0xcbf29ce484222325ull;
};

struct CacheStats {
    std::size_t hits = 0;
    std::size_t misses = 0;
    std::size_t puts = 0;
};

/// Content-addressed blob store under a root directory. A key is a hex
/// digest string; the blob lives at root/<key[0:2]>/<key>.bin. Writes go
/// through a temp file and rename, so a crashed writer never leaves a
/// truncated entry behind. Safe for concurrent use.
class CacheStore {
public:
    explicit CacheStore(std::filesystem::path root);

    std::optional<std::vector<std::uint8_t>> get(const std::string& key);
    void put(const std::string& key, std::span<const std::uint8_t> bytes);

    CacheStats stats() const { return {hits_.load(), misses_.load(), puts_.load()}; }
    const std::filesystem::path& root() const { return root_; }

private:
    std::filesystem::path entry_path(const std::string& key) const;

    std::filesystem::path root_;
    std::atomic<std::size_t> hits_{0};
    std::atomic<std::size_t> misses_{0};
    std::atomic<std::size_t> puts_{0};
    std::atomic<std::uint64_t> tmp_counter_{0};
};

}  // namespace depthpipe
