// drinfeld: certify monodromy surjectivity, check level-structure identities,
// run manifests.

#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "drinfeld/cli.hpp"

namespace dc = drinfeld::cli;

namespace {

void add_job_flags(CLI::App* app, dc::Job& job, std::string& json_path) {
  app->add_option("--q", job.q, "residue field size")->required();
  app->add_option("--n", job.n, "height")->required();
  app->add_option("--h", job.h, "connected height of the stratum");
  app->add_option("--m", job.m, "level");
  app->add_option("--spec", job.specs, "specialization, e.g. \"u0=t,u1=t^2\" (repeatable)");
  app->add_option("--precision", job.precision, "starting t-adic precision");
  app->add_option("--json", json_path, "write the JSON report here ('-' for stdout)");
  app->add_flag("--emit-roots", job.emit_roots, "include root expansions in the report");
}

int finish(const dc::Job& job, const std::string& json_path) {
  auto errs = dc::validate(job);
  if (!errs.empty()) {
    for (auto& e : errs) std::cerr << "usage: " << e << "\n";
    return dc::usage;
  }
  auto r = dc::run_job(job);
  if (json_path == "-") {
    std::cout << r.report.dump(2) << "\n";
  } else {
    std::cout << r.text;
    try {
      dc::write_report(json_path, r.report);
    } catch (const drinfeld::error& e) {
      std::cerr << e.what() << "\n";
      return dc::failure;
    }
  }
  if (r.exit == dc::failure) std::cerr << r.report.value("message", std::string("job failed")) << "\n";
  return r.exit;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Torsion towers and monodromy certificates for one-dimensional formal o-modules"};
  app.set_help_flag("--help", "print help");
  app.require_subcommand(1);

  dc::Job certify_job, ident_job, orders_job;
  certify_job.kind = dc::JobKind::certify;
  ident_job.kind = dc::JobKind::identities;
  orders_job.kind = dc::JobKind::orders;
  std::string certify_json, ident_json, orders_json, manifest_path, suite_json;

  auto* certify = app.add_subcommand("certify", "certify surjectivity of the level-m monodromy");
  add_job_flags(certify, certify_job, certify_json);

  auto* ident = app.add_subcommand("identities", "check the level-structure identities");
  add_job_flags(ident, ident_job, ident_json);
  ident->add_option("--check", ident_job.checks, "eq31 | eq41 | nonvanishing (repeatable)");

  auto* orders = app.add_subcommand("orders", "order of GL_{n-h}(o/pi^m)");
  add_job_flags(orders, orders_job, orders_json);

  auto* suite = app.add_subcommand("suite", "run a JSON manifest of jobs");
  suite->add_option("manifest", manifest_path, "manifest path")->required();
  suite->add_option("--json", suite_json, "write the aggregate report here ('-' for stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return dc::usage;
  }

  if (certify->parsed()) return finish(certify_job, certify_json);
  if (ident->parsed()) return finish(ident_job, ident_json);
  if (orders->parsed()) return finish(orders_job, orders_json);

  std::ifstream in(manifest_path);
  if (!in) {
    std::cerr << "cannot open " << manifest_path << "\n";
    return dc::usage;
  }
  dc::json manifest;
  try {
    manifest = dc::json::parse(in);
  } catch (const dc::json::parse_error& e) {
    std::cerr << "manifest: " << e.what() << "\n";
    return dc::usage;
  }
  auto r = dc::run_suite(manifest);
  if (!r.validation_errors.empty()) {
    for (auto& e : r.validation_errors) std::cerr << e << "\n";
    return r.exit;
  }
  if (suite_json == "-") {
    std::cout << r.report.dump(2) << "\n";
  } else {
    std::cout << r.text;
    if (!suite_json.empty()) dc::write_report(suite_json, r.report);
  }
  return r.exit;
}
