#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "mdv/errors.hpp"
#include "mdv/ingest.hpp"
#include "mdv/registry.hpp"
#include "mdv/repair.hpp"
#include "mdv/service.hpp"
#include "mdv/terms.hpp"
#include "mdv/validate.hpp"
#include "mdv/workbook.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kIssuesFound = 1;
constexpr int kUsageError = 2;
constexpr int kBackendError = 3;

std::string read_input(const std::string& path) {
  if (path == "-") {
    std::ostringstream buf;
    buf << std::cin.rdbuf();
    return buf.str();
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw mdv::IoError("cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_output(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw mdv::IoError("cannot write " + path);
  out << bytes;
}

std::optional<mdv::TemplateRef> parse_template_ref(const std::string& spec) {
  if (spec.empty()) return std::nullopt;
  auto at = spec.find('@');
  if (at == std::string::npos)
    throw mdv::SemanticError("template reference must be ID@VERSION, got \"" + spec + "\"");
  return mdv::TemplateRef{spec.substr(0, at), spec.substr(at + 1)};
}

mdv::TerminologyClient make_terms(const std::string& src) {
  if (src.rfind("http://", 0) == 0 || src.rfind("https://", 0) == 0)
    return mdv::make_remote_client(src);
  return mdv::make_fixture_client(src);
}

mdv::ResolvedTemplate resolve_with(const mdv::Template& t, const std::string& terms_src) {
  bool needs_terms = false;
  for (const auto& f : t.fields)
    if (f.value_set && f.value_set->source == mdv::ValueSetRef::Source::TerminologyService)
      needs_terms = true;
  if (!needs_terms) return mdv::resolve_template(t);
  if (terms_src.empty())
    throw mdv::SemanticError("template " + t.id +
                             " references a terminology service; pass --terms");
  mdv::TerminologyClient client = make_terms(terms_src);
  return mdv::resolve_template(t, client);
}

mdv::Template link_from_registry(const mdv::Table& table, const std::string& registry_dir,
                                 const std::optional<mdv::TemplateRef>& override_ref) {
  mdv::TemplateRegistry registry(registry_dir);
  return mdv::link_template(
      table,
      [&](const std::string& id, const std::string& ver) { return registry.get(id, ver); },
      [&] { return registry.load_all(); }, override_ref);
}

int cmd_template_lint(const std::string& file) {
  mdv::Template t = mdv::parse_template(read_input(file));
  auto findings = mdv::lint_template(t);
  for (const auto& f : findings) std::cout << "warning: " << f.message << "\n";
  std::cout << t.id << "@" << t.version.str() << ": " << findings.size() << " warning(s)\n";
  return kOk;
}

int cmd_template_register(const std::string& file, const std::string& registry_dir) {
  mdv::Template t = mdv::parse_template(read_input(file));
  mdv::TemplateRegistry registry(registry_dir);
  registry.put(t);
  std::cout << "registered " << t.id << "@" << t.version.str() << "\n";
  return kOk;
}

int cmd_sheet_generate(const std::string& template_spec, const std::string& registry_dir,
                       const std::string& out_path, bool tsv, const std::string& terms_src) {
  auto ref = parse_template_ref(template_spec);
  if (!ref) throw mdv::SemanticError("--template is required");
  mdv::TemplateRegistry registry(registry_dir);
  auto t = registry.get(ref->id, ref->version);
  if (!t)
    throw mdv::NotFoundError("template " + ref->id + "@" + ref->version +
                             " is not registered");
  mdv::ResolvedTemplate rt = resolve_with(*t, terms_src);
  if (tsv) {
    write_output(out_path, mdv::generate_delimited_skeleton(rt));
  } else {
    write_output(out_path, mdv::generate_workbook(rt).bytes);
  }
  std::cout << "wrote " << out_path << "\n";
  return kOk;
}

int cmd_sheet_validate(const std::string& file, const std::string& template_spec,
                       const std::string& registry_dir, const std::string& terms_src,
                       bool json_output) {
  std::string bytes = read_input(file);
  mdv::Table table = mdv::parse_any(bytes, file);
  mdv::Template t = link_from_registry(table, registry_dir, parse_template_ref(template_spec));
  mdv::ResolvedTemplate rt = resolve_with(t, terms_src);
  mdv::ValidationReport report = mdv::validate_table(rt, table);

  if (json_output) {
    std::cout << mdv::report_to_json(report);
  } else {
    for (const auto& issue : report.issues) {
      std::cout << "row " << issue.row_index << ", " << issue.column_key << ": "
                << mdv::to_string(issue.kind) << " (observed \"" << issue.observed
                << "\", expected " << issue.expected << ")\n";
    }
    std::cout << report.issues.size() << " issues in " << report.summary.total_records
              << " records\n";
  }
  return report.issues.empty() ? kOk : kIssuesFound;
}

int cmd_sheet_repair(const std::string& file, const std::string& patches_path,
                     const std::string& out_path, const std::string& template_spec,
                     const std::string& registry_dir, const std::string& terms_src) {
  std::string bytes = read_input(file);
  mdv::FileFormat format = mdv::sniff_format(bytes, file);
  mdv::Table table = mdv::parse_any(bytes, file);
  auto patches = mdv::patches_from_json(read_input(patches_path));
  mdv::Table patched = mdv::apply_patches(table, patches);

  if (format == mdv::FileFormat::Xlsx) {
    mdv::Template t =
        link_from_registry(patched, registry_dir, parse_template_ref(template_spec));
    mdv::ResolvedTemplate rt = resolve_with(t, terms_src);
    write_output(out_path, mdv::generate_workbook(rt, patched.records).bytes);
  } else {
    auto sep = format == mdv::FileFormat::Csv ? mdv::Separator::Comma : mdv::Separator::Tab;
    write_output(out_path, mdv::serialize_delimited(patched, sep));
  }
  std::cout << "applied " << patches.size() << " patch(es), wrote " << out_path << "\n";
  return kOk;
}

int cmd_serve(const std::string& listen, const std::string& registry_dir,
              const std::string& terms_src) {
  mdv::ServiceConfig cfg;
  auto colon = listen.rfind(':');
  if (colon == std::string::npos)
    throw mdv::SemanticError("--listen must be HOST:PORT");
  cfg.listen_host = listen.substr(0, colon);
  cfg.listen_port = std::stoi(listen.substr(colon + 1));
  cfg.registry_root = registry_dir;
  cfg.terms_source = terms_src;
  mdv::ValidationService service(cfg);
  std::cerr << "listening on " << cfg.listen_host << ":" << cfg.listen_port << "\n";
  if (!service.run()) throw mdv::IoError("cannot listen on " + listen);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Metadata template toolkit: generate, validate, and repair "
               "standards-adherent spreadsheets"};
  app.require_subcommand(1);

  std::string file, registry_dir = "registry", terms_src, template_spec, out_path,
              patches_path, listen = "127.0.0.1:8080";
  bool json_output = false, tsv = false;

  auto* tmpl = app.add_subcommand("template", "Template operations");
  tmpl->require_subcommand(1);
  auto* lint = tmpl->add_subcommand("lint", "Check a template document for quality warnings");
  lint->add_option("file", file)->required();
  auto* reg = tmpl->add_subcommand("register", "Add a template to a registry");
  reg->add_option("file", file)->required();
  reg->add_option("--registry", registry_dir);

  auto* sheet = app.add_subcommand("sheet", "Spreadsheet operations");
  sheet->require_subcommand(1);
  auto* generate = sheet->add_subcommand("generate", "Emit a constrained workbook or skeleton");
  generate->add_option("--template", template_spec, "ID@VERSION")->required();
  generate->add_option("--registry", registry_dir);
  generate->add_option("-o,--output", out_path)->required();
  generate->add_flag("--tsv", tsv, "Emit a tab-separated skeleton instead of a workbook");
  generate->add_option("--terms", terms_src, "Terminology fixture dir or base URL");
  auto* validate = sheet->add_subcommand("validate", "Validate a populated spreadsheet");
  validate->add_option("file", file, "Spreadsheet path, or - for stdin (delimited only)")
      ->required();
  validate->add_option("--template", template_spec, "ID@VERSION override");
  validate->add_option("--registry", registry_dir);
  validate->add_option("--terms", terms_src);
  validate->add_flag("--json", json_output, "Print the canonical report JSON");
  auto* repair = sheet->add_subcommand("repair", "Apply a patch list to a spreadsheet");
  repair->add_option("file", file)->required();
  repair->add_option("--patches", patches_path)->required();
  repair->add_option("-o,--output", out_path)->required();
  repair->add_option("--template", template_spec);
  repair->add_option("--registry", registry_dir);
  repair->add_option("--terms", terms_src);

  auto* serve = app.add_subcommand("serve", "Run the validation HTTP service");
  serve->add_option("--listen", listen, "HOST:PORT");
  serve->add_option("--registry", registry_dir);
  serve->add_option("--terms", terms_src);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kOk : kUsageError;
  }

  try {
    if (lint->parsed()) return cmd_template_lint(file);
    if (reg->parsed()) return cmd_template_register(file, registry_dir);
    if (generate->parsed())
      return cmd_sheet_generate(template_spec, registry_dir, out_path, tsv, terms_src);
    if (validate->parsed())
      return cmd_sheet_validate(file, template_spec, registry_dir, terms_src, json_output);
    if (repair->parsed())
      return cmd_sheet_repair(file, patches_path, out_path, template_spec, registry_dir,
                              terms_src);
    if (serve->parsed()) return cmd_serve(listen, registry_dir, terms_src);
  } catch (const mdv::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsageError;
  } catch (const mdv::SemanticError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsageError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kBackendError;
  }
  return kUsageError;
}
