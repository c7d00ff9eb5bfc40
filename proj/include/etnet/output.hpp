#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "etnet/fields.hpp"
#include "etnet/renewal_solver.hpp"

namespace etnet {

/// 17 significant digits, round-trip exact.
std::string format_real(double v);

/// Collects the files of one command invocation and writes the MANIFEST that lists them.
class OutputWriter {
public:
  explicit OutputWriter(std::filesystem::path dir);

  const std::filesystem::path& dir() const noexcept { return dir_; }

  /// Writes `content` to dir/name and records it in the manifest.
  void write(const std::string& name, const std::string& content, const std::string& description);
  /// Grid and run metadata repeated in the manifest header.
  void meta(const std::string& key, const std::string& value);

  /// Writes MANIFEST. An incomplete manifest carries the failure message.
  void finish(bool complete, const std::string& message = {});

  const std::vector<std::string>& files() const noexcept { return names_; }

private:
  std::filesystem::path dir_;
  std::vector<std::string> names_;
  std::vector<std::string> descriptions_;
  std::vector<std::pair<std::string, std::string>> meta_;
};

/// Header "t,x=<x0>,x=<x1>,..." then one row per time.
std::string series_csv(const std::vector<double>& times, const std::vector<ScalarField>& series);
/// Header "t,x,y,w" with one row per kernel entry per snapshot.
std::string kernel_snapshots_csv(const std::vector<double>& times, const std::vector<ConnectivityKernel>& w);
/// Header "x,y,w".
std::string kernel_csv(const ConnectivityKernel& w);
/// Header from `columns`, rows of equal length.
std::string table_csv(const std::vector<std::string>& columns, const std::vector<std::vector<double>>& rows);
/// gnuplot matrix-style blocks "t x value", a blank line between time slices.
std::string heatmap_data(const std::vector<double>& times, const std::vector<ScalarField>& series);

std::string heatmap_script(const std::string& data_file, const std::string& label, const std::string& png);
std::string trace_script(const std::string& data_file, int column, const std::string& label, const std::string& png);
std::string kernel_script(const std::string& data_file, const std::string& png);

/// Structured text summary: "[section]" headers followed by "key = value" lines.
class Summary {
public:
  void section(const std::string& name);
  void add(const std::string& key, double value);
  void add(const std::string& key, const std::string& value);
  void add(const std::string& key, const char* value) { add(key, std::string(value)); }
  void add(const std::string& key, bool value);
  std::string str() const { return text_; }

private:
  std::string text_;
};

}  // namespace etnet
