#include "liplab/report.hpp"

#include <cstring>
#include <filesystem>
#include <fstream>

#include "liplab/linalg.hpp"

namespace liplab {

std::string version_string() { return "liplab 0.1.0"; }

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

Csv::Csv(const std::string& path, const std::vector<std::string>& columns) {
  f_ = std::fopen(path.c_str(), "w");
  if (!f_) throw Error("Csv: cannot open " + path);
  for (size_t i = 0; i < columns.size(); ++i)
    std::fprintf(f_, "%s%s", columns[i].c_str(), i + 1 < columns.size() ? "," : "\n");
}

Csv::~Csv() {
  if (f_) std::fclose(f_);
}

void Csv::row(const std::vector<std::string>& cells) {
  for (size_t i = 0; i < cells.size(); ++i)
    std::fprintf(f_, "%s%s", cells[i].c_str(), i + 1 < cells.size() ? "," : "\n");
}

void write_plot(const std::string& path, const std::vector<double>& x,
                const std::vector<double>& y) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw Error("write_plot: cannot open " + path);
  for (size_t i = 0; i < x.size() && i < y.size(); ++i)
    std::fprintf(f, "%s %s\n", g17(x[i]).c_str(), g17(y[i]).c_str());
  std::fclose(f);
}

void TextReport::section(const std::string& name) {
  body_ += name + ":\n";
  indent_ = 2;
}
void TextReport::kv(const std::string& key, const std::string& value) {
  body_ += std::string(indent_, ' ') + key + " = " + value + "\n";
}
void TextReport::kv(const std::string& key, double value) { kv(key, g17(value)); }
void TextReport::kv(const std::string& key, bool value) {
  kv(key, std::string(value ? "true" : "false"));
}
void TextReport::line(const std::string& text) {
  body_ += std::string(indent_, ' ') + text + "\n";
}
void TextReport::save(const std::string& path) const {
  std::ofstream os(path);
  if (!os) throw Error("TextReport: cannot open " + path);
  os << body_;
}

void ensure_dir(const std::string& path) { std::filesystem::create_directories(path); }

}  // namespace liplab
