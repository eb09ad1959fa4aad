#include "mdv/terms.hpp"

#include <cctype>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "mdv/errors.hpp"

#include "httplib.h"

namespace mdv {

using json = nlohmann::json;

std::string normalize_token(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  bool pending_space = false;
  for (char ch : s) {
    unsigned char c = static_cast<unsigned char>(ch);
    if (std::isspace(c)) {
      if (!out.empty()) pending_space = true;
      continue;
    }
    if (pending_space) {
      out.push_back(' ');
      pending_space = false;
    }
    out.push_back(static_cast<char>(std::tolower(c)));
  }
  return out;
}

const std::string* SynonymIndex::lookup(const std::string& raw) const {
  auto it = entries.find(normalize_token(raw));
  return it == entries.end() ? nullptr : &it->second;
}

SynonymIndex build_synonym_index(const ValueSet& vs) {
  SynonymIndex idx;
  for (const auto& term : vs.terms) {
    // try_emplace keeps the first term on collision.
    idx.entries.try_emplace(normalize_token(term.label), term.label);
    for (const auto& syn : term.synonyms)
      idx.entries.try_emplace(normalize_token(syn), term.label);
  }
  return idx;
}

namespace {

ValueSet value_set_from_json(const std::string& text, const std::string& set_id) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError("malformed value-set document for \"" + set_id + "\": " + e.what());
  }
  ValueSet vs;
  vs.set_id = j.value("set_id", set_id);
  if (!j.contains("terms") || !j["terms"].is_array())
    throw ParseError("value-set document for \"" + set_id + "\" has no terms array");
  for (const auto& tj : j["terms"]) {
    Term t;
    t.label = tj.at("label").get<std::string>();
    if (tj.contains("synonyms"))
      for (const auto& s : tj["synonyms"]) t.synonyms.push_back(s.get<std::string>());
    if (tj.contains("iri") && !tj["iri"].is_null()) t.iri = tj["iri"].get<std::string>();
    vs.terms.push_back(std::move(t));
  }
  return vs;
}

}  // namespace

FixtureBackend::FixtureBackend(std::string fixture_dir) : dir_(std::move(fixture_dir)) {}

ValueSet FixtureBackend::fetch(const std::string& set_id) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir_))
    throw TransportError("fixture directory \"" + dir_ + "\" does not exist");
  fs::path path = fs::path(dir_) / (set_id + ".json");
  if (!fs::is_regular_file(path))
    throw NotFoundError("value set \"" + set_id + "\" not found");
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  ++reads_;
  return value_set_from_json(buf.str(), set_id);
}

RemoteBackend::RemoteBackend(std::string base_url) : base_url_(std::move(base_url)) {}

ValueSet RemoteBackend::fetch(const std::string& set_id) {
  httplib::Client client(base_url_);
  client.set_connection_timeout(5);
  auto res = client.Get("/value-sets/" + set_id);
  ++reads_;
  if (!res) throw TransportError("terminology service unreachable at " + base_url_);
  if (res->status == 404) throw NotFoundError("value set \"" + set_id + "\" not found");
  if (res->status != 200)
    throw TransportError("terminology service returned status " +
                         std::to_string(res->status));
  return value_set_from_json(res->body, set_id);
}

TerminologyClient::TerminologyClient(std::shared_ptr<TerminologyBackend> backend,
                                     std::chrono::seconds ttl)
    : backend_(std::move(backend)), ttl_(ttl) {}

ValueSet TerminologyClient::fetch_value_set(const std::string& set_id) {
  std::unique_lock lock(mu_);
  for (;;) {
    auto it = cache_.find(set_id);
    if (it != cache_.end() && std::chrono::steady_clock::now() < it->second.expires)
      return it->second.value;
    auto flight = in_flight_.find(set_id);
    if (flight == in_flight_.end() || !flight->second) break;
    cv_.wait(lock);  // another thread is fetching this set
  }
  in_flight_[set_id] = true;
  lock.unlock();

  try {
    ValueSet vs = backend_->fetch(set_id);
    lock.lock();
    cache_[set_id] = {vs, std::chrono::steady_clock::now() + ttl_};
    in_flight_[set_id] = false;
    cv_.notify_all();
    return vs;
  } catch (...) {
    lock.lock();
    in_flight_[set_id] = false;
    cv_.notify_all();
    throw;
  }
}

TerminologyClient make_fixture_client(const std::string& fixture_dir, std::chrono::seconds ttl) {
  return TerminologyClient(std::make_shared<FixtureBackend>(fixture_dir), ttl);
}

TerminologyClient make_remote_client(const std::string& base_url, std::chrono::seconds ttl) {
  return TerminologyClient(std::make_shared<RemoteBackend>(base_url), ttl);
}

}  // namespace mdv
