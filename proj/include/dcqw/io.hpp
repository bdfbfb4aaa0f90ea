#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "config.hpp"
#include "walker.hpp"

namespace dcqw {

using json = nlohmann::ordered_json;

// Writes "# config_hash=<hash>" then the header line.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::string& header, const std::string& hash) : f_(path) {
    if (!f_) throw std::runtime_error("cannot write " + path.string());
    f_ << "# config_hash=" << hash << "\n" << header << "\n";
  }
  template <class... Cols>
  void row(const Cols&... cols) {
    bool first = true;
    ((f_ << (first ? "" : ",") << cell(cols), first = false), ...);
    f_ << "\n";
  }

 private:
  static std::string cell(double v) { return fmt17(v); }
  static std::string cell(int v) { return std::to_string(v); }
  static std::string cell(const std::string& v) { return v; }
  std::ofstream f_;
};

inline void write_measure_csv(const std::filesystem::path& path, const ComplexMeasure& m, const std::string& hash) {
  CsvWriter w(path, "n,x,re_mu,im_mu", hash);
  for (int x = m.x_min; x <= m.x_max(); ++x) w.row(m.n, x, m.at(x).real(), m.at(x).imag());
}

// (x/n, n Re mu)
inline void write_normalized_csv(const std::filesystem::path& path, const ComplexMeasure& m, const std::string& hash) {
  CsvWriter w(path, "xbar,n_times_mu", hash);
  const double n = m.n > 0 ? double(m.n) : 1.0;
  for (int x = m.x_min; x <= m.x_max(); ++x) w.row(x / n, n * m.at(x).real());
}

inline void write_band_csv(const std::filesystem::path& path, int n, const std::vector<FieldCell>& cells,
                           const std::string& hash) {
  CsvWriter w(path, "n,x,y,re,im", hash);
  for (const auto& c : cells) w.row(n, c.x, c.y, c.value.real(), c.value.imag());
}

inline json to_json(cplx z) { return json::array({z.real(), z.imag()}); }

inline json to_json(const MatX& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json r = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) r.push_back(to_json(m(i, j)));
    rows.push_back(r);
  }
  return rows;
}

inline json to_json(const VecX& v) {
  json r = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) r.push_back(to_json(v(i)));
  return r;
}

inline void write_json(const std::filesystem::path& path, const json& j) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << j.dump(2) << "\n";
}

}  // namespace dcqw
