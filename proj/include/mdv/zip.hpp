#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace mdv::zip {

struct Entry {
  std::string name;
  std::string data;
};

// Builds a ZIP archive with stored (uncompressed) entries. XLSX readers
// accept stored entries; compression is not worth the coupling here.
std::string write_archive(const std::vector<Entry>& entries);

// Parses a ZIP archive via its central directory. Supports methods 0
// (stored) and 8 (deflate). Throws ParseError on a malformed archive.
class Archive {
public:
  explicit Archive(std::string bytes);

  bool contains(const std::string& name) const;
  // Throws NotFoundError if absent.
  std::string read(const std::string& name) const;
  std::vector<std::string> names() const;

private:
  struct Record {
    std::string name;
    std::uint16_t method;
    std::uint32_t compressed_size;
    std::uint32_t uncompressed_size;
    std::uint32_t local_header_offset;
  };
  std::string bytes_;
  std::vector<Record> records_;
};

}  // namespace mdv::zip
