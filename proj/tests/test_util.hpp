#pragma once

#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "mdv/ingest.hpp"
#include "mdv/table.hpp"
#include "mdv/template_model.hpp"
#include "mdv/terms.hpp"

namespace testutil {

inline std::string fixture_path(const std::string& rel) {
  return std::string(MDV_FIXTURE_DIR) + "/" + rel;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline mdv::Template load_template(const std::string& name) {
  return mdv::parse_template(read_file(fixture_path("templates/" + name + ".json")));
}

inline mdv::ResolvedTemplate resolved_rnaseq() {
  auto client = mdv::make_fixture_client(fixture_path("value-sets"));
  return mdv::resolve_template(load_template("rnaseq"), client);
}

inline mdv::ResolvedTemplate resolved_sample_block() {
  return mdv::resolve_template(load_template("sample_block"));
}

inline mdv::Table figure1_table() {
  return mdv::parse_delimited(read_file(fixture_path("figure1.tsv")), mdv::Separator::Tab);
}

// Scratch directory unique to the calling test binary run.
class TempDir {
public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("mdv_test_" + tag + "_" + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() { std::filesystem::remove_all(path_); }
  std::string str() const { return path_.string(); }

private:
  std::filesystem::path path_;
};

// Brute-force edit distance over all edit scripts, memoized. Independent
// of the production implementation; usable for |a|,|b| <= 8.
inline std::size_t brute_force_distance(const std::string& a, const std::string& b) {
  std::vector<std::vector<long>> memo(a.size() + 1, std::vector<long>(b.size() + 1, -1));
  std::function<std::size_t(std::size_t, std::size_t)> go = [&](std::size_t i,
                                                                std::size_t j) -> std::size_t {
    if (i == a.size()) return b.size() - j;
    if (j == b.size()) return a.size() - i;
    if (memo[i][j] >= 0) return static_cast<std::size_t>(memo[i][j]);
    std::size_t best = go(i + 1, j) + 1;                       // delete
    best = std::min(best, go(i, j + 1) + 1);                   // insert
    best = std::min(best, go(i + 1, j + 1) + (a[i] != b[j]));  // substitute / match
    memo[i][j] = static_cast<long>(best);
    return best;
  };
  return go(0, 0);
}

}  // namespace testutil
