#include "mdv/registry.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "mdv/errors.hpp"

namespace fs = std::filesystem;

namespace mdv {

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw IoError("cannot read " + p.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

TemplateRegistry::TemplateRegistry(std::string root) : root_(std::move(root)) {
  fs::create_directories(root_);
  rebuild_index();
}

void TemplateRegistry::rebuild_index() {
  index_.clear();
  for (const auto& id_dir : fs::directory_iterator(root_)) {
    if (!id_dir.is_directory()) continue;
    for (const auto& file : fs::directory_iterator(id_dir.path())) {
      if (file.path().extension() != ".json") continue;
      try {
        Template t = parse_template(slurp(file.path()));
        index_.push_back({t.id, t.version.str(), t.name});
      } catch (const std::exception&) {
        // Skip unreadable entries; the registry only serves valid documents.
      }
    }
  }
  std::sort(index_.begin(), index_.end(), [](const Entry& a, const Entry& b) {
    return a.id != b.id ? a.id < b.id : a.version < b.version;
  });
}

void TemplateRegistry::put(const Template& t) {
  std::lock_guard lock(mu_);
  fs::path dir = fs::path(root_) / t.id;
  fs::path target = dir / (t.version.str() + ".json");
  std::string doc = render_template(t);
  if (fs::exists(target)) {
    if (slurp(target) == doc) return;  // idempotent re-post
    throw SemanticError("template " + t.id + "@" + t.version.str() +
                        " already registered with different content");
  }
  fs::create_directories(dir);
  fs::path tmp = dir / (t.version.str() + ".json.tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out << doc;
  }
  fs::rename(tmp, target);  // atomic publish
  rebuild_index();
}

std::optional<Template> TemplateRegistry::get(const std::string& id,
                                             const std::string& version) const {
  fs::path target = fs::path(root_) / id / (version + ".json");
  std::lock_guard lock(mu_);
  if (!fs::is_regular_file(target)) return std::nullopt;
  return parse_template(slurp(target));
}

std::vector<TemplateRegistry::Entry> TemplateRegistry::list() const {
  std::lock_guard lock(mu_);
  return index_;
}

std::vector<Template> TemplateRegistry::load_all() const {
  std::lock_guard lock(mu_);
  std::vector<Template> out;
  for (const auto& e : index_) {
    fs::path target = fs::path(root_) / e.id / (e.version + ".json");
    if (fs::is_regular_file(target)) out.push_back(parse_template(slurp(target)));
  }
  return out;
}

std::size_t TemplateRegistry::size() const {
  std::lock_guard lock(mu_);
  return index_.size();
}

}  // namespace mdv
