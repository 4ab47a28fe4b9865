#pragma once

#include <atomic>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>

namespace topovox {

/// Content-addressed store of stage outputs. Keys are SHA-256 digests of
/// (input content hash, stage name, parameter fingerprint); entries are
/// written atomically so concurrent workers never see partial files.
class Cache {
 public:
  explicit Cache(std::filesystem::path dir);

  static std::string key(const std::string& content_hash, const std::string& stage, const std::string& params);

  std::optional<std::string> get(const std::string& key);
  void put(const std::string& key, const std::string& value);

  std::size_t hits() const { return hits_; }
  std::size_t misses() const { return misses_; }
  const std::filesystem::path& dir() const { return dir_; }

 private:
  std::filesystem::path path_for(const std::string& key) const;

  std::filesystem::path dir_;
  std::atomic<std::size_t> hits_{0};
  std::atomic<std::size_t> misses_{0};
};

}  // namespace topovox
