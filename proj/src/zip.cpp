#include "mdv/zip.hpp"

#include <zlib.h>

#include <cstring>

#include "mdv/errors.hpp"

namespace mdv::zip {

namespace {

void put16(std::string& out, std::uint16_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>((v >> 8) & 0xff));
}

void put32(std::string& out, std::uint32_t v) {
  put16(out, static_cast<std::uint16_t>(v & 0xffff));
  put16(out, static_cast<std::uint16_t>(v >> 16));
}

std::uint16_t get16(const std::string& s, std::size_t off) {
  return static_cast<std::uint16_t>(static_cast<unsigned char>(s[off]) |
                                    (static_cast<unsigned char>(s[off + 1]) << 8));
}

std::uint32_t get32(const std::string& s, std::size_t off) {
  return static_cast<std::uint32_t>(get16(s, off)) |
         (static_cast<std::uint32_t>(get16(s, off + 2)) << 16);
}

std::string inflate_raw(const std::string& data, std::size_t expected_size) {
  std::string out(expected_size, '\0');
  z_stream zs{};
  if (inflateInit2(&zs, -MAX_WBITS) != Z_OK) throw IoError("zlib init failed");
  zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(data.data()));
  zs.avail_in = static_cast<uInt>(data.size());
  zs.next_out = reinterpret_cast<Bytef*>(out.data());
  zs.avail_out = static_cast<uInt>(out.size());
  int rc = inflate(&zs, Z_FINISH);
  inflateEnd(&zs);
  if (rc != Z_STREAM_END) throw ParseError("corrupt deflate stream in archive");
  out.resize(out.size() - zs.avail_out);
  return out;
}

constexpr std::uint32_t kLocalSig = 0x04034b50;
constexpr std::uint32_t kCentralSig = 0x02014b50;
constexpr std::uint32_t kEocdSig = 0x06054b50;
// Fixed DOS timestamp (1980-01-01) keeps output byte-stable.
constexpr std::uint16_t kDosTime = 0;
constexpr std::uint16_t kDosDate = 0x0021;

}  // namespace

std::string write_archive(const std::vector<Entry>& entries) {
  std::string out;
  std::string central;
  for (const auto& e : entries) {
    auto crc = static_cast<std::uint32_t>(
        crc32(0L, reinterpret_cast<const Bytef*>(e.data.data()), static_cast<uInt>(e.data.size())));
    std::uint32_t offset = static_cast<std::uint32_t>(out.size());
    std::uint32_t size = static_cast<std::uint32_t>(e.data.size());

    put32(out, kLocalSig);
    put16(out, 20);  // version needed
    put16(out, 0);   // flags
    put16(out, 0);   // method: stored
    put16(out, kDosTime);
    put16(out, kDosDate);
    put32(out, crc);
    put32(out, size);
    put32(out, size);
    put16(out, static_cast<std::uint16_t>(e.name.size()));
    put16(out, 0);  // extra length
    out += e.name;
    out += e.data;

    put32(central, kCentralSig);
    put16(central, 20);  // version made by
    put16(central, 20);  // version needed
    put16(central, 0);
    put16(central, 0);
    put16(central, kDosTime);
    put16(central, kDosDate);
    put32(central, crc);
    put32(central, size);
    put32(central, size);
    put16(central, static_cast<std::uint16_t>(e.name.size()));
    put16(central, 0);  // extra
    put16(central, 0);  // comment
    put16(central, 0);  // disk
    put16(central, 0);  // internal attrs
    put32(central, 0);  // external attrs
    put32(central, offset);
    central += e.name;
  }
  std::uint32_t central_offset = static_cast<std::uint32_t>(out.size());
  out += central;
  put32(out, kEocdSig);
  put16(out, 0);
  put16(out, 0);
  put16(out, static_cast<std::uint16_t>(entries.size()));
  put16(out, static_cast<std::uint16_t>(entries.size()));
  put32(out, static_cast<std::uint32_t>(central.size()));
  put32(out, central_offset);
  put16(out, 0);  // comment length
  return out;
}

Archive::Archive(std::string bytes) : bytes_(std::move(bytes)) {
  if (bytes_.size() < 22) throw ParseError("not a zip archive: too short");
  // EOCD may be followed by a comment; scan backwards.
  std::size_t eocd = std::string::npos;
  std::size_t lowest = bytes_.size() >= 22 + 0xffff ? bytes_.size() - 22 - 0xffff : 0;
  for (std::size_t i = bytes_.size() - 22; ; --i) {
    if (get32(bytes_, i) == kEocdSig) {
      eocd = i;
      break;
    }
    if (i == lowest) break;
  }
  if (eocd == std::string::npos) throw ParseError("not a zip archive: no end record");
  std::uint16_t count = get16(bytes_, eocd + 10);
  std::uint32_t cdir_size = get32(bytes_, eocd + 12);
  std::uint32_t cdir_off = get32(bytes_, eocd + 16);
  if (cdir_off + cdir_size > bytes_.size()) throw ParseError("corrupt zip central directory");

  std::size_t pos = cdir_off;
  for (std::uint16_t i = 0; i < count; ++i) {
    if (pos + 46 > bytes_.size() || get32(bytes_, pos) != kCentralSig)
      throw ParseError("corrupt zip central directory entry");
    Record r;
    r.method = get16(bytes_, pos + 10);
    r.compressed_size = get32(bytes_, pos + 20);
    r.uncompressed_size = get32(bytes_, pos + 24);
    std::uint16_t name_len = get16(bytes_, pos + 28);
    std::uint16_t extra_len = get16(bytes_, pos + 30);
    std::uint16_t comment_len = get16(bytes_, pos + 32);
    r.local_header_offset = get32(bytes_, pos + 42);
    if (pos + 46 + name_len > bytes_.size()) throw ParseError("corrupt zip entry name");
    r.name = bytes_.substr(pos + 46, name_len);
    records_.push_back(std::move(r));
    pos += 46 + name_len + extra_len + comment_len;
  }
}

bool Archive::contains(const std::string& name) const {
  for (const auto& r : records_)
    if (r.name == name) return true;
  return false;
}

std::vector<std::string> Archive::names() const {
  std::vector<std::string> out;
  for (const auto& r : records_) out.push_back(r.name);
  return out;
}

std::string Archive::read(const std::string& name) const {
  for (const auto& r : records_) {
    if (r.name != name) continue;
    std::size_t lh = r.local_header_offset;
    if (lh + 30 > bytes_.size() || get32(bytes_, lh) != kLocalSig)
      throw ParseError("corrupt zip local header for " + name);
    std::uint16_t name_len = get16(bytes_, lh + 26);
    std::uint16_t extra_len = get16(bytes_, lh + 28);
    std::size_t data_off = lh + 30 + name_len + extra_len;
    if (data_off + r.compressed_size > bytes_.size())
      throw ParseError("truncated zip entry " + name);
    std::string raw = bytes_.substr(data_off, r.compressed_size);
    if (r.method == 0) return raw;
    if (r.method == 8) return inflate_raw(raw, r.uncompressed_size);
    throw ParseError("unsupported zip compression method for " + name);
  }
  throw NotFoundError("zip entry not found: " + name);
}

}  // namespace mdv::zip
