#include <zlib.h>

#include <array>
#include <cstring>
#include <fstream>
#include <vector>

#include "topovox/error.hpp"
#include "topovox/fetch.hpp"

namespace topovox {
namespace {

constexpr std::uint32_t kEocdSignature = 0x06054b50;
constexpr std::uint32_t kEocd64LocatorSignature = 0x07064b50;
constexpr std::uint32_t kEocd64Signature = 0x06064b50;
constexpr std::uint32_t kCentralSignature = 0x02014b50;
constexpr std::uint32_t kLocalSignature = 0x04034b50;

std::uint64_t le(const std::uint8_t* p, int bytes) {
  std::uint64_t v = 0;
  for (int i = bytes - 1; i >= 0; --i) v = (v << 8) | p[i];
  return v;
}

[[noreturn]] void corrupt(const std::string& what) { fail(ErrorCode::kIntegrity, "corrupted archive: " + what); }

class Reader {
 public:
  explicit Reader(const std::filesystem::path& path) : in_(path, std::ios::binary) {
    if (!in_) fail(ErrorCode::kIo, "cannot open " + path.string());
    in_.seekg(0, std::ios::end);
    size_ = static_cast<std::uint64_t>(in_.tellg());
  }
  std::uint64_t size() const { return size_; }
  std::vector<std::uint8_t> read(std::uint64_t offset, std::uint64_t n) {
    if (offset > size_ || n > size_ - offset) corrupt("read past end of file");
    std::vector<std::uint8_t> buf(n);
    in_.seekg(static_cast<std::streamoff>(offset));
    in_.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(n));
    if (!in_) corrupt("short read");
    return buf;
  }
  std::ifstream& stream() { return in_; }

 private:
  std::ifstream in_;
  std::uint64_t size_ = 0;
};

struct Entry {
  std::string name;
  std::uint16_t method = 0;
  std::uint32_t crc = 0;
  std::uint64_t compressed = 0;
  std::uint64_t uncompressed = 0;
  std::uint64_t local_offset = 0;
};

std::filesystem::path safe_join(const std::filesystem::path& dest, const std::string& name) {
  std::filesystem::path rel(name);
  if (rel.is_absolute()) corrupt("absolute entry path " + name);
  for (const auto& part : rel) {
    if (part == "..") corrupt("entry escapes destination: " + name);
  }
  return dest / rel;
}

void apply_zip64(const std::uint8_t* extra, std::size_t len, Entry& e) {
  std::size_t pos = 0;
  while (pos + 4 <= len) {
    const auto id = static_cast<std::uint16_t>(le(extra + pos, 2));
    const auto size = static_cast<std::uint16_t>(le(extra + pos + 2, 2));
    if (pos + 4 + size > len) corrupt("extra field overflow");
    if (id == 0x0001) {
      std::size_t q = pos + 4;
      auto take = [&](std::uint64_t& field) {
        if (field != 0xFFFFFFFFu) return;
        if (q + 8 > pos + 4 + size) corrupt("short zip64 field");
        field = le(extra + q, 8);
        q += 8;
      };
      take(e.uncompressed);
      take(e.compressed);
      take(e.local_offset);
    }
    pos += 4 + size;
  }
}

}  // namespace

std::size_t extract_zip(const std::filesystem::path& archive, const std::filesystem::path& dest) {
  Reader reader(archive);
  if (reader.size() < 22) corrupt("too small for a ZIP file");

  const std::uint64_t tail_len = std::min<std::uint64_t>(reader.size(), 65557);
  const auto tail = reader.read(reader.size() - tail_len, tail_len);
  std::int64_t eocd = -1;
  for (std::int64_t i = static_cast<std::int64_t>(tail.size()) - 22; i >= 0; --i) {
    if (le(&tail[i], 4) == kEocdSignature) {
      eocd = i;
      break;
    }
  }
  if (eocd < 0) corrupt("end of central directory not found");
  const std::uint8_t* e = &tail[static_cast<std::size_t>(eocd)];
  std::uint64_t count = le(e + 10, 2);
  std::uint64_t cd_size = le(e + 12, 4);
  std::uint64_t cd_offset = le(e + 16, 4);

  const std::int64_t locator = eocd - 20;
  if (locator >= 0 && le(&tail[static_cast<std::size_t>(locator)], 4) == kEocd64LocatorSignature) {
    const std::uint64_t eocd64_offset = le(&tail[static_cast<std::size_t>(locator) + 8], 8);
    const auto rec = reader.read(eocd64_offset, 56);
    if (le(rec.data(), 4) != kEocd64Signature) corrupt("bad zip64 end record");
    count = le(rec.data() + 32, 8);
    cd_size = le(rec.data() + 40, 8);
    cd_offset = le(rec.data() + 48, 8);
  }

  const auto cd = reader.read(cd_offset, cd_size);
  std::vector<Entry> entries;
  std::size_t pos = 0;
  for (std::uint64_t i = 0; i < count; ++i) {
    if (pos + 46 > cd.size() || le(&cd[pos], 4) != kCentralSignature) corrupt("bad central directory entry");
    Entry entry;
    entry.method = static_cast<std::uint16_t>(le(&cd[pos + 10], 2));
    entry.crc = static_cast<std::uint32_t>(le(&cd[pos + 16], 4));
    entry.compressed = le(&cd[pos + 20], 4);
    entry.uncompressed = le(&cd[pos + 24], 4);
    const auto name_len = le(&cd[pos + 28], 2);
    const auto extra_len = le(&cd[pos + 30], 2);
    const auto comment_len = le(&cd[pos + 32], 2);
    entry.local_offset = le(&cd[pos + 42], 4);
    if (pos + 46 + name_len + extra_len + comment_len > cd.size()) corrupt("central entry overflow");
    entry.name.assign(reinterpret_cast<const char*>(&cd[pos + 46]), name_len);
    apply_zip64(&cd[pos + 46 + name_len], extra_len, entry);
    entries.push_back(std::move(entry));
    pos += 46 + name_len + extra_len + comment_len;
  }

  std::size_t written = 0;
  std::vector<std::uint8_t> in_buf(1 << 16);
  std::vector<std::uint8_t> out_buf(1 << 16);
  for (const auto& entry : entries) {
    const auto target = safe_join(dest, entry.name);
    if (!entry.name.empty() && entry.name.back() == '/') {
      std::filesystem::create_directories(target);
      continue;
    }
    const auto local = reader.read(entry.local_offset, 30);
    if (le(local.data(), 4) != kLocalSignature) corrupt("bad local header for " + entry.name);
    const std::uint64_t data_offset = entry.local_offset + 30 + le(local.data() + 26, 2) + le(local.data() + 28, 2);
    if (data_offset > reader.size() || entry.compressed > reader.size() - data_offset) {
      corrupt("entry data past end of file: " + entry.name);
    }
    if (entry.method != 0 && entry.method != 8) {
      fail(ErrorCode::kUnsupportedFormat, "zip compression method " + std::to_string(entry.method));
    }

    std::filesystem::create_directories(target.parent_path());
    std::ofstream out(target, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorCode::kIo, "cannot write " + target.string());

    auto& in = reader.stream();
    in.seekg(static_cast<std::streamoff>(data_offset));
    std::uint64_t remaining = entry.compressed;
    std::uint64_t produced = 0;
    uLong crc = crc32(0L, Z_NULL, 0);

    z_stream zs{};
    if (entry.method == 8 && inflateInit2(&zs, -MAX_WBITS) != Z_OK) corrupt("inflate init failed");
    bool stream_end = entry.method == 0;
    while (remaining > 0) {
      const auto chunk = static_cast<std::size_t>(std::min<std::uint64_t>(remaining, in_buf.size()));
      in.read(reinterpret_cast<char*>(in_buf.data()), static_cast<std::streamsize>(chunk));
      if (!in) corrupt("short read in " + entry.name);
      remaining -= chunk;
      if (entry.method == 0) {
        crc = crc32(crc, in_buf.data(), static_cast<uInt>(chunk));
        out.write(reinterpret_cast<const char*>(in_buf.data()), static_cast<std::streamsize>(chunk));
        produced += chunk;
        continue;
      }
      zs.next_in = in_buf.data();
      zs.avail_in = static_cast<uInt>(chunk);
      while (zs.avail_in > 0 && !stream_end) {
        zs.next_out = out_buf.data();
        zs.avail_out = static_cast<uInt>(out_buf.size());
        const int rc = inflate(&zs, Z_NO_FLUSH);
        if (rc != Z_OK && rc != Z_STREAM_END) {
          inflateEnd(&zs);
          corrupt("inflate failed in " + entry.name);
        }
        const std::size_t have = out_buf.size() - zs.avail_out;
        crc = crc32(crc, out_buf.data(), static_cast<uInt>(have));
        out.write(reinterpret_cast<const char*>(out_buf.data()), static_cast<std::streamsize>(have));
        produced += have;
        if (rc == Z_STREAM_END) stream_end = true;
      }
    }
    if (entry.method == 8) inflateEnd(&zs);
    if (!stream_end) corrupt("truncated deflate stream in " + entry.name);
    if (produced != entry.uncompressed || crc != entry.crc) corrupt("CRC mismatch in " + entry.name);
    ++written;
  }
  return written;
}

}  // namespace topovox
