#include "topovox/cache.hpp"

#include <fstream>
#include <sstream>

#include "topovox/csv.hpp"
#include "topovox/error.hpp"
#include "topovox/fetch.hpp"

namespace topovox {

Cache::Cache(std::filesystem::path dir) : dir_(std::move(dir)) {
  std::error_code ec;
  std::filesystem::create_directories(dir_, ec);
  if (ec) fail(ErrorCode::kIo, "cannot create cache directory " + dir_.string() + ": " + ec.message());
}

std::string Cache::key(const std::string& content_hash, const std::string& stage, const std::string& params) {
  const std::string material = "topovox-cache-v1\n" + content_hash + "\n" + stage + "\n" + params;
  return sha256_hex({reinterpret_cast<const std::uint8_t*>(material.data()), material.size()});
}

std::filesystem::path Cache::path_for(const std::string& key) const { return dir_ / key.substr(0, 2) / key; }

std::optional<std::string> Cache::get(const std::string& key) {
  std::ifstream in(path_for(key), std::ios::binary);
  if (!in) {
    ++misses_;
    return std::nullopt;
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  ++hits_;
  return buf.str();
}

void Cache::put(const std::string& key, const std::string& value) {
  const auto path = path_for(key);
  std::filesystem::create_directories(path.parent_path());
  csv::write_file_atomic(path, value);
}

}  // namespace topovox
