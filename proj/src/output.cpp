#include "etnet/output.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "etnet/error.hpp"

namespace etnet {

std::string format_real(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

OutputWriter::OutputWriter(std::filesystem::path dir) : dir_(std::move(dir)) {
  std::error_code ec;
  std::filesystem::create_directories(dir_, ec);
  if (ec) throw Error("cannot create output directory '" + dir_.string() + "': " + ec.message());
}

void OutputWriter::write(const std::string& name, const std::string& content, const std::string& description) {
  std::ofstream out(dir_ / name, std::ios::binary);
  out << content;
  if (!out) throw Error("cannot write '" + (dir_ / name).string() + "'");
  names_.push_back(name);
  descriptions_.push_back(description);
}

void OutputWriter::meta(const std::string& key, const std::string& value) { meta_.emplace_back(key, value); }

void OutputWriter::finish(bool complete, const std::string& message) {
  std::ostringstream m;
  m << "status = " << (complete ? "complete" : "incomplete") << "\n";
  if (!complete) m << "error = " << message << "\n";
  for (const auto& [k, v] : meta_) m << k << " = " << v << "\n";
  m << "files = " << names_.size() << "\n";
  for (std::size_t i = 0; i < names_.size(); ++i) m << "file = " << names_[i] << " | " << descriptions_[i] << "\n";
  std::ofstream out(dir_ / "MANIFEST", std::ios::binary);
  out << m.str();
}

std::string series_csv(const std::vector<double>& times, const std::vector<ScalarField>& series) {
  std::string s = "t";
  if (!series.empty())
    for (std::size_t i = 0; i < series.front().size(); ++i) s += ",x=" + format_real(series.front().grid().node(i));
  s += '\n';
  for (std::size_t k = 0; k < times.size(); ++k) {
    s += format_real(times[k]);
    for (double v : series[k].values()) s += ',' + format_real(v);
    s += '\n';
  }
  return s;
}

std::string kernel_snapshots_csv(const std::vector<double>& times, const std::vector<ConnectivityKernel>& w) {
  std::string s = "t,x,y,w\n";
  for (std::size_t k = 0; k < times.size(); ++k) {
    const auto& g = w[k].grid();
    const std::string t = format_real(times[k]);
    for (std::size_t i = 0; i < g.size(); ++i)
      for (std::size_t j = 0; j < g.size(); ++j)
        s += t + ',' + format_real(g.node(i)) + ',' + format_real(g.node(j)) + ',' + format_real(w[k](i, j)) + '\n';
  }
  return s;
}

std::string kernel_csv(const ConnectivityKernel& w) {
  std::string s = "x,y,w\n";
  const auto& g = w.grid();
  for (std::size_t i = 0; i < g.size(); ++i)
    for (std::size_t j = 0; j < g.size(); ++j)
      s += format_real(g.node(i)) + ',' + format_real(g.node(j)) + ',' + format_real(w(i, j)) + '\n';
  return s;
}

std::string table_csv(const std::vector<std::string>& columns, const std::vector<std::vector<double>>& rows) {
  std::string s;
  for (std::size_t i = 0; i < columns.size(); ++i) s += (i ? "," : "") + columns[i];
  s += '\n';
  for (const auto& r : rows) {
    if (r.size() != columns.size()) throw DimensionError("table row length differs from the header");
    for (std::size_t i = 0; i < r.size(); ++i) s += (i ? "," : "") + format_real(r[i]);
    s += '\n';
  }
  return s;
}

std::string heatmap_data(const std::vector<double>& times, const std::vector<ScalarField>& series) {
  std::string s = "# t x value\n";
  for (std::size_t k = 0; k < times.size(); ++k) {
    const std::string t = format_real(times[k]);
    for (std::size_t i = 0; i < series[k].size(); ++i)
      s += t + ' ' + format_real(series[k].grid().node(i)) + ' ' + format_real(series[k][i]) + '\n';
    s += '\n';
  }
  return s;
}

std::string heatmap_script(const std::string& data_file, const std::string& label, const std::string& png) {
  std::ostringstream g;
  g << "set terminal pngcairo size 900,600\n"
    << "set output '" << png << "'\n"
    << "set xlabel 't'\nset ylabel 'x'\nset title '" << label << "(t,x)'\n"
    << "set view map\nset palette rgbformulae 33,13,10\n"
    << "splot '" << data_file << "' using 1:2:3 with pm3d notitle\n";
  return g.str();
}

std::string trace_script(const std::string& data_file, int column, const std::string& label, const std::string& png) {
  std::ostringstream g;
  g << "set terminal pngcairo size 900,600\n"
    << "set output '" << png << "'\n"
    << "set datafile separator ','\nset logscale y\nset xlabel 't'\nset title '" << label << "'\n"
    << "plot '" << data_file << "' using 1:" << column << " skip 1 with lines notitle\n";
  return g.str();
}

std::string kernel_script(const std::string& data_file, const std::string& png) {
  std::ostringstream g;
  g << "set terminal pngcairo size 700,600\n"
    << "set output '" << png << "'\n"
    << "set datafile separator ','\nset xlabel 'x'\nset ylabel 'y'\nset title 'w(x,y)'\n"
    << "set view map\nset palette rgbformulae 33,13,10\n"
    << "splot '" << data_file << "' using 1:2:3 skip 1 with points pt 5 ps 0.6 palette notitle\n";
  return g.str();
}

void Summary::section(const std::string& name) { text_ += (text_.empty() ? "[" : "\n[") + name + "]\n"; }
void Summary::add(const std::string& key, double value) { text_ += key + " = " + format_real(value) + '\n'; }
void Summary::add(const std::string& key, const std::string& value) { text_ += key + " = " + value + '\n'; }
void Summary::add(const std::string& key, bool value) { text_ += key + " = " + (value ? "true" : "false") + '\n'; }

}  // namespace etnet
