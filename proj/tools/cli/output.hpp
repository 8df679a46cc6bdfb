#pragma once

#include <functional>
#include <string>
#include <vector>

#include "json.hpp"

namespace critasym::cli {

/// 17 significant digits, scientific; NaN and infinities spelled nan, inf, -inf.
std::string fmt(double v);

/// CSV text whose first line is the manifest line "# config_hash=<hex> command=<name>".
class CsvTable {
 public:
  CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}
  /// Cells are already formatted; fields with commas or quotes are quoted.
  void add_row(std::vector<std::string> cells);
  std::string render(const std::string& hash, const std::string& command) const;
  std::size_t rows() const { return rows_.size(); }

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

/// The only component that touches the output directory.
class Writer {
 public:
  Writer(std::string dir, std::string command, std::string hash);
  void write(const std::string& name, const std::string& content);
  void write_csv(const std::string& name, const CsvTable& table) { write(name, table.render(hash_, command_)); }
  void write_json(const std::string& name, const nlohmann::ordered_json& j) { write(name, j.dump(2) + "\n"); }
  const std::vector<std::string>& files() const { return files_; }
  const std::string& hash() const { return hash_; }

 private:
  std::string dir_;
  std::string command_;
  std::string hash_;
  std::vector<std::string> files_;
};

/// Runs task(i) for i in [0, count) on `jobs` threads. Tasks write only to
/// their own result slot; the first exception by index is rethrown.
void run_pool(int jobs, std::size_t count, const std::function<void(std::size_t)>& task);

}  // namespace critasym::cli
