#pragma once

#include <memory>
#include <string>

#include "config.hpp"
#include "json.hpp"
#include "output.hpp"

namespace critasym::cli {

enum ExitCode { kOk = 0, kValidation = 1, kPartial = 2, kInternal = 3 };

struct Context {
  std::string command;
  Config cfg;
  std::string out_dir = "out";
  int jobs = 1;
  double tol_scale = 1.0;

  // Set by start_compute(): the configuration is frozen and validated.
  bool computing = false;
  std::string hash;
  std::unique_ptr<Writer> writer;

  /// Rejects unknown keys, fixes the hash and opens the writer.
  void start_compute();
  /// Manifest skeleton; `jobs` and the output directory are deliberately
  /// absent so that reruns with other values stay byte-identical.
  nlohmann::ordered_json manifest(const nlohmann::ordered_json& tolerances) const;
};

int cmd_kdv_phase(Context& ctx);
int cmd_kdv_compare(Context& ctx);
int cmd_rmt_phase(Context& ctx);
int cmd_op_table(Context& ctx);
int cmd_toda_run(Context& ctx);

}  // namespace critasym::cli
