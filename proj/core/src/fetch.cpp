#include "topovox/fetch.hpp"

#include <openssl/evp.h>

#include <array>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <memory>
#include <sstream>

#include "httplib.h"
#include "json.hpp"
#include "topovox/csv.hpp"
#include "topovox/error.hpp"

namespace topovox {
namespace {

class Sha256 {
 public:
  Sha256() : ctx_(EVP_MD_CTX_new(), &EVP_MD_CTX_free) {
    if (!ctx_ || EVP_DigestInit_ex(ctx_.get(), EVP_sha256(), nullptr) != 1) {
      fail(ErrorCode::kIo, "sha256 init failed");
    }
  }
  void update(const void* data, std::size_t n) { EVP_DigestUpdate(ctx_.get(), data, n); }
  std::string hex() {
    std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx_.get(), digest.data(), &len);
    std::ostringstream out;
    for (unsigned int i = 0; i < len; ++i) out << std::hex << std::setw(2) << std::setfill('0') << int(digest[i]);
    return out.str();
  }

 private:
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx_;
};

struct Url {
  std::string origin;  // scheme://host[:port]
  std::string target;  // /path?query
  std::string file_name;
};

Url parse_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) fail(ErrorCode::kInvalidParameter, "URL without scheme: " + url);
  const auto scheme = url.substr(0, scheme_end);
  if (scheme != "http" && scheme != "https") fail(ErrorCode::kInvalidParameter, "unsupported scheme " + scheme);
  const auto path_start = url.find('/', scheme_end + 3);
  Url out;
  out.origin = url.substr(0, path_start);
  out.target = path_start == std::string::npos ? "/" : url.substr(path_start);
  auto path = out.target.substr(0, out.target.find('?'));
  out.file_name = path.substr(path.find_last_of('/') + 1);
  if (out.file_name.empty()) out.file_name = "dataset.zip";
  return out;
}

std::string read_recorded_checksum(const std::filesystem::path& checksum_file) {
  std::ifstream in(checksum_file);
  std::string hex;
  in >> hex;
  return hex;
}

void download(const Url& url, const std::filesystem::path& out_path) {
  httplib::Client client(url.origin);
  client.set_follow_location(true);
  client.set_connection_timeout(30, 0);
  client.set_read_timeout(300, 0);

  auto tmp = out_path;
  tmp += ".part";
  std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::kIo, "cannot write " + tmp.string());
  auto result = client.Get(url.target, [&](const char* data, std::size_t len) {
    out.write(data, static_cast<std::streamsize>(len));
    return static_cast<bool>(out);
  });
  out.close();
  if (!result) {
    std::filesystem::remove(tmp);
    fail(ErrorCode::kNetwork, "GET " + url.origin + url.target + " failed: " + httplib::to_string(result.error()));
  }
  if (result->status != 200) {
    std::filesystem::remove(tmp);
    fail(ErrorCode::kNetwork, "GET " + url.origin + url.target + " returned HTTP " + std::to_string(result->status));
  }
  std::filesystem::rename(tmp, out_path);
}

std::string get_text(const Url& url) {
  httplib::Client client(url.origin);
  client.set_follow_location(true);
  client.set_connection_timeout(30, 0);
  client.set_read_timeout(60, 0);
  auto result = client.Get(url.target);
  if (!result) fail(ErrorCode::kNetwork, "GET " + url.origin + url.target + " failed: " + httplib::to_string(result.error()));
  if (result->status != 200)
    fail(ErrorCode::kNetwork, "GET " + url.origin + url.target + " returned HTTP " + std::to_string(result->status));
  return result->body;
}

bool is_zip(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  char magic[4] = {};
  in.read(magic, 4);
  return in && magic[0] == 'P' && magic[1] == 'K' && magic[2] == 3 && magic[3] == 4;
}

bool is_zip_name(const std::string& name) {
  return name.size() >= 4 && name.compare(name.size() - 4, 4, ".zip") == 0;
}

bool is_tar_name(const std::string& name) {
  auto ends = [&](const std::string& suffix) {
    return name.size() >= suffix.size() && name.compare(name.size() - suffix.size(), suffix.size(), suffix) == 0;
  };
  return ends(".tar") || ends(".tar.gz") || ends(".tgz") || ends(".tar.xz") || ends(".tar.bz2");
}

void extract(const std::filesystem::path& archive, const std::filesystem::path& dest) {
  std::filesystem::create_directories(dest);
  if (is_zip(archive)) {
    extract_zip(archive, dest);
    return;
  }
  if (is_tar_name(archive.filename().string())) {
    const std::string cmd = "tar -xf '" + archive.string() + "' -C '" + dest.string() + "'";
    if (std::system(cmd.c_str()) != 0) fail(ErrorCode::kIntegrity, "tar could not extract " + archive.string());
    return;
  }
  fail(ErrorCode::kIntegrity, "unrecognized archive format: " + archive.string());
}

}  // namespace

std::string sha256_hex(std::span<const std::uint8_t> bytes) {
  Sha256 h;
  h.update(bytes.data(), bytes.size());
  return h.hex();
}

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIo, "cannot open " + path.string());
  Sha256 h;
  std::vector<char> buf(1 << 16);
  while (in) {
    in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
    h.update(buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  return h.hex();
}

ArchiveLink resolve_zenodo_record(const std::string& record, const std::string& api_origin) {
  if (record.empty() || record.find_first_not_of("0123456789") != std::string::npos)
    fail(ErrorCode::kInvalidParameter, "zenodo record id must be numeric, got '" + record + "'");
  const auto body = get_text(parse_url(api_origin + "/api/records/" + record));
  try {
    const auto j = nlohmann::json::parse(body);
    std::vector<ArchiveLink> links;
    for (const auto& f : j.at("files")) {
      links.push_back({f.at("links").at("self").get<std::string>(), f.at("key").get<std::string>()});
    }
    if (links.empty()) fail(ErrorCode::kFormat, "zenodo record " + record + " lists no files");
    for (const auto& l : links) {
      if (is_zip_name(l.name)) return l;
    }
    return links.front();
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kFormat, "unexpected zenodo record metadata: " + std::string(e.what()));
  }
}

FetchResult fetch_dataset(const std::string& url, const std::filesystem::path& dest_dir,
                          const FetchOptions& options) {
  namespace fs = std::filesystem;
  std::string resolved = url;
  std::string name = options.archive_name;
  if (url.rfind("zenodo:", 0) == 0) {
    fs::create_directories(dest_dir);
    // the record metadata is only needed when no archive was fetched before
    const auto pin = dest_dir / "zenodo-link.txt";
    std::ifstream pinned(pin);
    std::string link, pinned_name;
    if (pinned && std::getline(pinned, link) && std::getline(pinned, pinned_name) && !link.empty()) {
      resolved = link;
      if (name.empty()) name = pinned_name;
    } else {
      const auto l = resolve_zenodo_record(url.substr(7), options.zenodo_api);
      resolved = l.url;
      if (name.empty()) name = l.name;
      csv::write_file_atomic(pin, l.url + "\n" + l.name + "\n");
    }
  }
  const Url parsed = parse_url(resolved);
  fs::create_directories(dest_dir);

  FetchResult result;
  result.archive = dest_dir / (name.empty() ? parsed.file_name : name);
  auto checksum_file = result.archive;
  checksum_file += ".sha256";

  std::string checksum;
  if (fs::exists(result.archive) && fs::exists(checksum_file)) {
    const auto recorded = read_recorded_checksum(checksum_file);
    const auto actual = sha256_file(result.archive);
    const bool expected_ok = options.expected_sha256.empty() || options.expected_sha256 == actual;
    if (recorded == actual && expected_ok) checksum = actual;
  }

  if (checksum.empty()) {
    int attempt = 0;
    while (true) {
      try {
        download(parsed, result.archive);
        break;
      } catch (const Error& e) {
        if (!e.retryable() || ++attempt >= options.max_attempts) throw;
      }
    }
    result.downloaded = true;
    checksum = sha256_file(result.archive);
    if (!options.expected_sha256.empty() && checksum != options.expected_sha256) {
      fs::remove(result.archive);
      fail(ErrorCode::kIntegrity, "checksum mismatch: expected " + options.expected_sha256 + ", got " + checksum);
    }
    csv::write_file_atomic(checksum_file, checksum + "  " + result.archive.filename().string() + "\n");
  }

  const auto data_dir = dest_dir / "data";
  const auto marker = data_dir / ".extracted";
  if (result.downloaded || read_recorded_checksum(marker) != checksum) {
    extract(result.archive, data_dir);
    csv::write_file_atomic(marker, checksum + "\n");
  }

  result.manifest = scan_dataset(data_dir);
  result.manifest.checksum = checksum;
  return result;
}

}  // namespace topovox
