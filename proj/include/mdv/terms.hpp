#pragma once

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include "mdv/template_model.hpp"

namespace mdv {

struct ValueSet {
  std::string set_id;
  std::vector<Term> terms;

  bool operator==(const ValueSet&) const = default;
};

std::string normalize_token(const std::string& s);  // ASCII lowercase + whitespace collapse

// Normalized string -> canonical term label. Labels self-map; synonyms map to
// their term's label; collisions resolve to the earlier term in the set.
struct SynonymIndex {
  std::unordered_map<std::string, std::string> entries;

  const std::string* lookup(const std::string& raw) const;
};

SynonymIndex build_synonym_index(const ValueSet& vs);

// Backing store for value sets. Implementations must be thread-safe.
class TerminologyBackend {
public:
  virtual ~TerminologyBackend() = default;
  // Throws NotFoundError for unknown ids, TransportError when unreachable.
  virtual ValueSet fetch(const std::string& set_id) = 0;
  // Number of physical reads served, for cache observability.
  virtual std::uint64_t read_count() const = 0;
};

class FixtureBackend : public TerminologyBackend {
public:
  explicit FixtureBackend(std::string fixture_dir);
  ValueSet fetch(const std::string& set_id) override;
  std::uint64_t read_count() const override { return reads_; }

private:
  std::string dir_;
  std::atomic<std::uint64_t> reads_{0};
};

// GET {base_url}/value-sets/{set_id}; 404 -> NotFoundError, connection
// failure -> TransportError.
class RemoteBackend : public TerminologyBackend {
public:
  explicit RemoteBackend(std::string base_url);
  ValueSet fetch(const std::string& set_id) override;
  std::uint64_t read_count() const override { return reads_; }

private:
  std::string base_url_;
  std::atomic<std::uint64_t> reads_{0};
};

// TTL cache over a backend with request coalescing: at most one in-flight
// backend fetch per set id.
class TerminologyClient {
public:
  explicit TerminologyClient(std::shared_ptr<TerminologyBackend> backend,
                             std::chrono::seconds ttl = std::chrono::seconds(86400));

  ValueSet fetch_value_set(const std::string& set_id);
  std::uint64_t backend_reads() const { return backend_->read_count(); }

private:
  struct Entry {
    ValueSet value;
    std::chrono::steady_clock::time_point expires;
  };
  std::shared_ptr<TerminologyBackend> backend_;
  std::chrono::seconds ttl_;
  std::mutex mu_;
  std::condition_variable cv_;
  std::map<std::string, Entry> cache_;
  std::map<std::string, bool> in_flight_;
};

// Convenience: client over a fixture directory or a remote base URL.
TerminologyClient make_fixture_client(const std::string& fixture_dir,
                                      std::chrono::seconds ttl = std::chrono::seconds(86400));
TerminologyClient make_remote_client(const std::string& base_url,
                                     std::chrono::seconds ttl = std::chrono::seconds(86400));

}  // namespace mdv
