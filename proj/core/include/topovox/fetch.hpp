#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>

#include "topovox/audio_io.hpp"

namespace topovox {

std::string sha256_hex(std::span<const std::uint8_t> bytes);
std::string sha256_file(const std::filesystem::path& path);

/// Extracts a ZIP archive (stored or deflate entries). CRC failures and
/// malformed directories raise kIntegrity. Returns the number of files written.
std::size_t extract_zip(const std::filesystem::path& archive, const std::filesystem::path& dest);

struct FetchOptions {
  /// Expected sha256 of the archive; empty skips the comparison.
  std::string expected_sha256;
  int max_attempts = 3;
  /// File name of the archive inside dest_dir; derived from the URL when empty.
  std::string archive_name;
  /// Origin used to resolve "zenodo:<record>" URLs.
  std::string zenodo_api = "https://zenodo.org";
};

struct ArchiveLink {
  std::string url;
  std::string name;
};

/// First ZIP file (else the first file) listed by a Zenodo record.
ArchiveLink resolve_zenodo_record(const std::string& record, const std::string& api_origin = "https://zenodo.org");

struct FetchResult {
  DatasetManifest manifest;
  std::filesystem::path archive;
  bool downloaded = false;  // false on a cache hit
};

/// Downloads url (HTTP or HTTPS, redirects followed; "zenodo:<record>" is
/// resolved through the record API and pinned in dest_dir) into dest_dir, records
/// `<archive>.sha256`, extracts ZIP archives into dest_dir/data and scans the
/// result into a manifest. A cached archive whose recorded checksum still
/// matches is reused without touching the network.
FetchResult fetch_dataset(const std::string& url, const std::filesystem::path& dest_dir,
                          const FetchOptions& options = {});

}  // namespace topovox
