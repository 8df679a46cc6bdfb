#include <cstdio>
#include <exception>
#include <filesystem>
#include <map>

#include "CLI11.hpp"
#include "commands.hpp"
#include "critasym/errors.hpp"

namespace cli = critasym::cli;

namespace {

void write_error(cli::Context& ctx, int code, const std::string& type, const std::string& message) {
  nlohmann::ordered_json j;
  j["command"] = ctx.command;
  j["exit_code"] = code;
  j["error_type"] = type;
  j["message"] = message;
  j["config_hash"] = ctx.hash;
  std::fprintf(stderr, "%s\n", j.dump().c_str());
  try {
    std::filesystem::create_directories(ctx.out_dir);
    cli::Writer(ctx.out_dir, ctx.command, ctx.hash).write_json("error.json", j);
  } catch (const std::exception&) {
    // stderr already carries the report
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Critical asymptotics toolkit: KdV, random matrices, orthogonal polynomials, Toda"};
  app.require_subcommand(1);

  const std::map<std::string, int (*)(cli::Context&)> table = {
      {"kdv-phase", cli::cmd_kdv_phase},   {"kdv-compare", cli::cmd_kdv_compare}, {"rmt-phase", cli::cmd_rmt_phase},
      {"op-table", cli::cmd_op_table},     {"toda-run", cli::cmd_toda_run},
  };
  const std::map<std::string, std::string> help = {
      {"kdv-phase", "Oscillation-zone edges x-(t), x+(t) after the gradient catastrophe"},
      {"kdv-compare", "Direct KdV solves against an asymptotic formula, error per eps"},
      {"rmt-phase", "Phase diagram of the quartic family V_{x,t}"},
      {"op-table", "Recurrence coefficients against their asymptotics"},
      {"toda-run", "Toda hierarchy flow of a recurrence state"},
  };

  std::string config_path, out_dir = "out";
  int jobs = 1;
  double tol_scale = 1.0;
  std::vector<std::string> overrides;
  for (const auto& [name, fn] : table) {
    CLI::App* sub = app.add_subcommand(name, help.at(name));
    sub->add_option("--config", config_path, "key = value configuration file");
    sub->add_option("--out", out_dir, "output directory")->capture_default_str();
    sub->add_option("--jobs", jobs, "worker threads")->capture_default_str();
    sub->add_option("--tol-scale", tol_scale, "multiplier on solver tolerances")->capture_default_str();
    sub->add_option("--set", overrides, "override KEY=VALUE (repeatable)");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? cli::kOk : cli::kValidation;
  }

  cli::Context ctx;
  ctx.command = app.get_subcommands().front()->get_name();
  ctx.out_dir = out_dir;
  ctx.jobs = jobs;
  ctx.tol_scale = tol_scale;
  try {
    if (!config_path.empty()) ctx.cfg = cli::Config::load(config_path);
    for (const auto& o : overrides) ctx.cfg.set_assignment(o);
    const int code = table.at(ctx.command)(ctx);
    std::fprintf(stderr, "%s: %s, outputs in %s\n", ctx.command.c_str(), code == 0 ? "ok" : "partial failure",
                 ctx.out_dir.c_str());
    return code;
  } catch (const critasym::Error& e) {
    // Before computation starts every library error is a rejected input.
    const int code = ctx.computing ? cli::kPartial : cli::kValidation;
    write_error(ctx, code, e.kind(), e.what());
    return code;
  } catch (const std::exception& e) {
    write_error(ctx, cli::kInternal, "internal", e.what());
    return cli::kInternal;
  }
}
