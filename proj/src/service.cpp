#include "mdv/service.hpp"

#include <thread>

#include "httplib.h"
#include "json.hpp"
#include "mdv/errors.hpp"
#include "mdv/ingest.hpp"
#include "mdv/repair.hpp"
#include "mdv/validate.hpp"
#include "mdv/workbook.hpp"

namespace mdv {

using json = nlohmann::ordered_json;

namespace {

std::string base64_encode(const std::string& in) {
  static const char* chars =
      "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
  std::string out;
  out.reserve((in.size() + 2) / 3 * 4);
  std::size_t i = 0;
  while (i + 2 < in.size()) {
    std::uint32_t n = (static_cast<unsigned char>(in[i]) << 16) |
                      (static_cast<unsigned char>(in[i + 1]) << 8) |
                      static_cast<unsigned char>(in[i + 2]);
    out.push_back(chars[(n >> 18) & 63]);
    out.push_back(chars[(n >> 12) & 63]);
    out.push_back(chars[(n >> 6) & 63]);
    out.push_back(chars[n & 63]);
    i += 3;
  }
  if (i + 1 == in.size()) {
    std::uint32_t n = static_cast<unsigned char>(in[i]) << 16;
    out.push_back(chars[(n >> 18) & 63]);
    out.push_back(chars[(n >> 12) & 63]);
    out += "==";
  } else if (i + 2 == in.size()) {
    std::uint32_t n = (static_cast<unsigned char>(in[i]) << 16) |
                      (static_cast<unsigned char>(in[i + 1]) << 8);
    out.push_back(chars[(n >> 18) & 63]);
    out.push_back(chars[(n >> 12) & 63]);
    out.push_back(chars[(n >> 6) & 63]);
    out.push_back('=');
  }
  return out;
}

void reply_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(2) + "\n", "application/json");
}

void reply_error(httplib::Response& res, int status, const std::string& message) {
  reply_json(res, status, json{{"error", message}});
}

bool is_remote_source(const std::string& src) {
  return src.rfind("http://", 0) == 0 || src.rfind("https://", 0) == 0;
}

}  // namespace

struct ValidationService::Impl {
  ServiceConfig cfg;
  TemplateRegistry registry;
  TerminologyClient terms;
  httplib::Server server;
  std::thread worker;

  explicit Impl(ServiceConfig c)
      : cfg(std::move(c)),
        registry(cfg.registry_root),
        terms(is_remote_source(cfg.terms_source)
                  ? make_remote_client(cfg.terms_source)
                  : make_fixture_client(cfg.terms_source)) {
    server.set_payload_max_length(cfg.payload_limit);
    setup_routes();
  }

  ResolvedTemplate resolve(const Template& t) { return resolve_template(t, terms); }

  Template link(const Table& table, const std::optional<TemplateRef>& override_ref) {
    return link_template(
        table,
        [this](const std::string& id, const std::string& ver) { return registry.get(id, ver); },
        [this] { return registry.load_all(); }, override_ref);
  }

  static std::optional<TemplateRef> override_from_query(const httplib::Request& req) {
    if (req.has_param("template")) {
      std::string spec = req.get_param_value("template");
      auto at = spec.find('@');
      if (at == std::string::npos) return TemplateRef{spec, ""};
      return TemplateRef{spec.substr(0, at), spec.substr(at + 1)};
    }
    if (req.has_param("template_id") && req.has_param("version"))
      return TemplateRef{req.get_param_value("template_id"), req.get_param_value("version")};
    return std::nullopt;
  }

  struct Payload {
    std::string bytes;
    std::string name_hint;
  };

  static Payload extract_payload(const httplib::Request& req) {
    if (req.is_multipart_form_data()) {
      for (const auto& item : req.files) {
        if (item.first == "file" || item.second.filename.size())
          return {item.second.content, item.second.filename};
      }
      throw ParseError("multipart request without a file part");
    }
    return {req.body, req.get_header_value("X-Filename")};
  }

  void setup_routes() {
    server.set_default_headers({{"Access-Control-Allow-Origin", "*"}});
    server.Options(R"(.*)", [](const httplib::Request&, httplib::Response& res) {
      res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
      res.set_header("Access-Control-Allow-Headers", "Content-Type, X-Filename");
      res.status = 204;
    });

    server.Get("/health", [this](const httplib::Request&, httplib::Response& res) {
      reply_json(res, 200, json{{"status", "ok"}, {"templates_loaded", registry.size()}});
    });

    server.Post("/templates", [this](const httplib::Request& req, httplib::Response& res) {
      try {
        Template t = parse_template(req.body);
        registry.put(t);
        reply_json(res, 201, json{{"id", t.id}, {"version", t.version.str()}});
      } catch (const ParseError& e) {
        reply_error(res, 400, e.what());
      } catch (const SemanticError& e) {
        std::string msg = e.what();
        bool conflict = msg.find("already registered") != std::string::npos;
        reply_error(res, conflict ? 409 : 400, msg);
      }
    });

    server.Get("/templates", [this](const httplib::Request&, httplib::Response& res) {
      json out = json::array();
      for (const auto& e : registry.list())
        out.push_back({{"id", e.id}, {"version", e.version}, {"name", e.name}});
      reply_json(res, 200, out);
    });

    server.Get(R"(/templates/([^/]+)/([^/]+)/workbook)",
               [this](const httplib::Request& req, httplib::Response& res) {
                 with_template(req, res, [&](const Template& t) {
                   GeneratedWorkbook wb = generate_workbook(resolve(t));
                   res.status = 200;
                   res.set_content(wb.bytes,
                                   "application/vnd.openxmlformats-officedocument."
                                   "spreadsheetml.sheet");
                 });
               });

    server.Get(R"(/templates/([^/]+)/([^/]+)/skeleton\.tsv)",
               [this](const httplib::Request& req, httplib::Response& res) {
                 with_template(req, res, [&](const Template& t) {
                   res.status = 200;
                   res.set_content(generate_delimited_skeleton(resolve(t)),
                                   "text/tab-separated-values");
                 });
               });

    server.Get(R"(/templates/([^/]+)/([^/]+)/spec\.md)",
               [this](const httplib::Request& req, httplib::Response& res) {
                 with_template(req, res, [&](const Template& t) {
                   res.status = 200;
                   res.set_content(render_spec_doc(resolve(t)), "text/markdown");
                 });
               });

    server.Get(R"(/templates/([^/]+)/([^/]+))",
               [this](const httplib::Request& req, httplib::Response& res) {
                 with_template(req, res, [&](const Template& t) {
                   res.status = 200;
                   res.set_content(render_template(t), "application/json");
                 });
               });

    server.Post("/validate", [this](const httplib::Request& req, httplib::Response& res) {
      Table table;
      try {
        Payload p = extract_payload(req);
        table = parse_any(p.bytes, p.name_hint);
      } catch (const std::exception& e) {
        reply_error(res, 400, e.what());
        return;
      }
      Template t;
      try {
        t = link(table, override_from_query(req));
      } catch (const std::exception& e) {
        json body{{"error", e.what()}, {"candidates", json::array()}};
        for (const auto& entry : registry.list())
          body["candidates"].push_back({{"id", entry.id}, {"version", entry.version}});
        reply_json(res, 422, body);
        return;
      }
      try {
        ValidationReport report = validate_table(resolve(t), table);
        res.status = 200;
        res.set_content(report_to_json(report), "application/json");
      } catch (const std::exception& e) {
        reply_error(res, 422, e.what());
      }
    });

    server.Post("/suggest", [this](const httplib::Request& req, httplib::Response& res) {
      try {
        json body = json::parse(req.body);
        Table table = table_from_json(body.at("table"));
        std::optional<TemplateRef> ref;
        if (body.contains("template"))
          ref = TemplateRef{body["template"].at("id").get<std::string>(),
                            body["template"].at("version").get<std::string>()};
        Template t = link(table, ref);
        ResolvedTemplate rt = resolve(t);

        DefaultRanker ranker;
        json out = json::array();
        for (const auto& ij : body.at("issues")) {
          Issue issue;
          issue.row_index = ij.at("row").get<std::size_t>();
          issue.column_key = ij.at("column").get<std::string>();
          issue.observed = ij.value("observed", std::string());
          std::string kind = ij.value("kind", std::string("not_in_value_set"));
          issue.kind = kind == "missing_required" ? IssueKind::MissingRequired
                                                  : IssueKind::NotInValueSet;
          if (const Cell* cell = table.cell_at(issue.row_index, issue.column_key);
              cell && issue.observed.empty())
            issue.observed = cell->raw;
          json suggestions = json::array();
          for (const auto& s : suggest_for_issue(rt, issue, &ranker))
            suggestions.push_back({{"value", s.value},
                                   {"score", s.score},
                                   {"provenance", to_string(s.provenance)}});
          out.push_back({{"row", issue.row_index},
                         {"column", issue.column_key},
                         {"suggestions", std::move(suggestions)}});
        }
        reply_json(res, 200, json{{"suggestions", std::move(out)}});
      } catch (const std::exception& e) {
        reply_error(res, 400, e.what());
      }
    });

    server.Post("/repair", [this](const httplib::Request& req, httplib::Response& res) {
      try {
        Payload p;
        std::string patches_text;
        if (req.is_multipart_form_data()) {
          for (const auto& item : req.files) {
            if (item.first == "file") p = {item.second.content, item.second.filename};
            if (item.first == "patches") patches_text = item.second.content;
          }
        } else {
          json body = json::parse(req.body);
          if (body.contains("file_base64"))
            throw ParseError("send multipart form data with file and patches parts");
          p.bytes = body.at("table_tsv").get<std::string>();
          p.name_hint = "table.tsv";
          patches_text = body.at("patches").dump();
        }
        if (p.bytes.empty()) throw ParseError("repair request without a file part");

        FileFormat format = sniff_format(p.bytes, p.name_hint);
        Table table = parse_any(p.bytes, p.name_hint);
        std::vector<Patch> patches = patches_from_json(patches_text);

        Table patched;
        try {
          patched = apply_patches(table, patches);
        } catch (const SemanticError& e) {
          reply_error(res, 400, e.what());
          return;
        }

        Template t = link(patched, override_from_query(req));
        ResolvedTemplate rt = resolve(t);
        ValidationReport report = validate_table(rt, patched);

        std::string file_bytes;
        std::string format_name;
        if (format == FileFormat::Xlsx) {
          file_bytes = generate_workbook(rt, patched.records).bytes;
          format_name = "xlsx";
        } else {
          Separator sep = format == FileFormat::Csv ? Separator::Comma : Separator::Tab;
          file_bytes = serialize_delimited(patched, sep);
          format_name = format == FileFormat::Csv ? "csv" : "tsv";
        }

        json out{{"format", format_name},
                 {"file_base64", base64_encode(file_bytes)},
                 {"report", json::parse(report_to_json(report))}};
        reply_json(res, 200, out);
      } catch (const std::exception& e) {
        reply_error(res, 400, e.what());
      }
    });
  }

  static Table table_from_json(const json& j) {
    Table t;
    for (const auto& h : j.at("headers")) t.headers.push_back(h.get<std::string>());
    for (const auto& rj : j.at("records")) {
      Record rec;
      rec.row_index = rj.at("row").get<std::size_t>();
      std::size_t i = 0;
      for (const auto& cj : rj.at("cells")) {
        Cell cell;
        cell.column_key = i < t.headers.size() ? t.headers[i] : "";
        cell.raw = cj.get<std::string>();
        cell.was_blank = cell.raw.empty();
        rec.cells.push_back(std::move(cell));
        ++i;
      }
      if (rec.cells.size() != t.headers.size())
        throw ParseError("table excerpt record has wrong cell count");
      t.records.push_back(std::move(rec));
    }
    if (j.contains("template"))
      t.provenance = Provenance{j["template"].at("id").get<std::string>(),
                                j["template"].at("version").get<std::string>()};
    return t;
  }

  template <typename Fn>
  void with_template(const httplib::Request& req, httplib::Response& res, Fn&& fn) {
    auto found = registry.get(req.matches[1], req.matches[2]);
    if (!found) {
      reply_error(res, 404, "unknown template " + std::string(req.matches[1]) + "@" +
                                std::string(req.matches[2]));
      return;
    }
    try {
      fn(*found);
    } catch (const NotFoundError& e) {
      reply_error(res, 404, e.what());
    } catch (const std::exception& e) {
      reply_error(res, 500, e.what());
    }
  }
};

ValidationService::ValidationService(ServiceConfig cfg)
    : impl_(std::make_unique<Impl>(std::move(cfg))) {}

ValidationService::~ValidationService() { stop(); }

bool ValidationService::run() {
  return impl_->server.listen(impl_->cfg.listen_host, impl_->cfg.listen_port);
}

int ValidationService::start_async() {
  int port = impl_->server.bind_to_any_port(impl_->cfg.listen_host);
  impl_->worker = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
  return port;
}

void ValidationService::stop() {
  if (impl_->server.is_running()) impl_->server.stop();
  if (impl_->worker.joinable()) impl_->worker.join();
}

}  // namespace mdv
