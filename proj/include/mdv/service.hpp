#pragma once

#include <memory>
#include <string>

#include "mdv/registry.hpp"
#include "mdv/terms.hpp"

namespace mdv {

struct ServiceConfig {
  std::string listen_host = "127.0.0.1";
  int listen_port = 8080;
  std::string registry_root;
  // Terminology source: a fixture directory path or an http(s) base URL.
  std::string terms_source;
  std::size_t payload_limit = 20 * 1024 * 1024;
};

class ValidationService {
public:
  explicit ValidationService(ServiceConfig cfg);
  ~ValidationService();

  // Blocks until stop(). Returns false if the listen address is unusable.
  bool run();
  // Binds to an ephemeral port and serves on a background thread; returns
  // the bound port. For tests.
  int start_async();
  void stop();

private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace mdv
