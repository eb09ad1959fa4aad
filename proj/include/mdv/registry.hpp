#pragma once

#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "mdv/template_model.hpp"

namespace mdv {

// Filesystem-backed store of released templates. Layout:
// {root}/{template_id}/{version}.json. Released versions are immutable;
// writes are atomic (write-temp-then-rename). Single writer, many readers.
class TemplateRegistry {
public:
  explicit TemplateRegistry(std::string root);

  struct Entry {
    std::string id;
    std::string version;
    std::string name;
  };

  // Throws SemanticError on a content conflict for an existing (id, version).
  void put(const Template& t);
  std::optional<Template> get(const std::string& id, const std::string& version) const;
  std::vector<Entry> list() const;
  std::vector<Template> load_all() const;
  std::size_t size() const;

private:
  void rebuild_index();

  std::string root_;
  mutable std::mutex mu_;
  std::vector<Entry> index_;
};

}  // namespace mdv
