// liplab - deterministic CSV and report emission
#ifndef LIPLAB_REPORT_HPP
#define LIPLAB_REPORT_HPP

#include <cstdio>
#include <string>
#include <vector>

namespace liplab {

std::string version_string();

/// Shortest round-trip decimal formatting; identical across runs.
std::string g17(double v);

class Csv {
 public:
  Csv(const std::string& path, const std::vector<std::string>& columns);
  ~Csv();
  Csv(const Csv&) = delete;
  Csv& operator=(const Csv&) = delete;
  void row(const std::vector<std::string>& cells);

 private:
  std::FILE* f_ = nullptr;
};

/// Two-column plot data file (x value per line).
void write_plot(const std::string& path, const std::vector<double>& x,
                const std::vector<double>& y);

/// Key-value structured text report; nested sections by indentation.
class TextReport {
 public:
  void section(const std::string& name);
  void kv(const std::string& key, const std::string& value);
  void kv(const std::string& key, double value);
  void kv(const std::string& key, bool value);
  void line(const std::string& text);
  void save(const std::string& path) const;
  const std::string& text() const { return body_; }

 private:
  std::string body_;
  int indent_ = 0;
};

void ensure_dir(const std::string& path);

}  // namespace liplab

#endif
