#pragma once

#include <Eigen/Dense>
#include <charconv>
#include <complex>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rsmc/errors.hpp"
#include "rsmc/report.hpp"
#include "rsmc/rng.hpp"

namespace rsmc {

using ordered_json = nlohmann::ordered_json;

// Shortest round-trip decimal form; locale-free and byte-stable, which the
// reproducibility contract of the output files relies on.
inline std::string format_number(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline std::string format_number(std::int64_t v) { return std::to_string(v); }
inline std::string format_number(std::uint64_t v) { return std::to_string(v); }
inline std::string format_number(int v) { return std::to_string(v); }

// Minimal CSV writer pinned to ',' separators, '.' decimals, LF endings.
class CsvWriter {
 public:
  explicit CsvWriter(std::string header) { out_ += header + "\n"; }

  template <typename... Fields>
  void row(const Fields&... fields) {
    bool first = true;
    (
        [&] {
          if (!first) out_ += ',';
          first = false;
          append(fields);
        }(),
        ...);
    out_ += '\n';
  }

  const std::string& str() const { return out_; }

 private:
  // Text fields with separators or quotes get standard CSV quoting.
  void append(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) {
      out_ += s;
      return;
    }
    out_ += '"';
    for (char c : s) {
      if (c == '"') out_ += '"';
      out_ += c;
    }
    out_ += '"';
  }
  void append(const char* s) { append(std::string(s)); }
  void append(double v) { out_ += format_number(v); }
  void append(int v) { out_ += format_number(v); }
  void append(std::int64_t v) { out_ += format_number(v); }
  void append(std::uint64_t v) { out_ += format_number(v); }
  void append(bool v) { out_ += v ? "true" : "false"; }

  std::string out_;
};

inline void write_text_file(const std::filesystem::path& path,
                            const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  require(out.good(), Errc::IoFailure, "cannot open for writing: " + path.string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  require(out.good(), Errc::IoFailure, "write failed: " + path.string());
}

inline std::string matrix_csv(const Eigen::MatrixXd& m) {
  CsvWriter csv("i,j,value");
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      csv.row(static_cast<int>(i + 1), static_cast<int>(j + 1), m(i, j));
  return csv.str();
}

inline ordered_json report_json(const ConvergenceReport& r) {
  ordered_json j;
  j["statistic"] = r.name;
  j["axis"] = r.axis_label;
  ordered_json rows = ordered_json::array();
  for (std::size_t i = 0; i < r.rows(); ++i) {
    ordered_json row;
    row[r.axis_label] = r.axis[i];
    row["estimate"] = r.estimates[i];
    row["std_error"] = r.std_errors[i];
    row["oracle"] = r.oracles[i];
    row["error"] = r.errors[i];
    if (i < r.bounds.size()) row["bound"] = r.bounds[i];
    rows.push_back(row);
  }
  j["rows"] = rows;
  for (const auto& [key, values] : r.aux) j["aux"][key] = values;
  if (!std::isnan(r.decay_order)) j["decay_order"] = r.decay_order;
  j["pass"] = r.pass;
  j["criterion"] = r.criterion;
  return j;
}

inline ordered_json report_json(const TightnessReport& r) {
  ordered_json j;
  j["statistic"] = "tightness";
  j["n_grid"] = r.n_grid;
  j["c_grid"] = r.c_grid;
  j["delta_grid"] = r.delta_grid;
  j["epsilon"] = r.epsilon;
  j["trials"] = r.trials;
  j["sup_tail"] = r.sup_tail;
  j["modulus_tail"] = r.modulus_tail;
  j["range_bound_violations"] = r.range_bound_violations;
  j["pass"] = r.pass;
  j["criterion"] = r.criterion;
  return j;
}

inline ordered_json cf_json(std::complex<double> value,
                            std::complex<double> std_error) {
  ordered_json j;
  j["re"] = value.real();
  j["im"] = value.imag();
  j["se_re"] = std_error.real();
  j["se_im"] = std_error.imag();
  return j;
}

inline void append_report_rows(CsvWriter& csv, const ConvergenceReport& r) {
  for (std::size_t i = 0; i < r.rows(); ++i)
    csv.row(r.name, r.axis[i], r.estimates[i], r.std_errors[i], r.oracles[i],
            r.errors[i], r.pass);
}

inline std::uint64_t checksum_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), Errc::IoFailure, "cannot open for checksum: " + path.string());
  std::uint64_t h = 0xcbf29ce484222325ULL;
  char buf[4096];
  while (in.read(buf, sizeof(buf)) || in.gcount() > 0)
    h = fnv1a64(buf, static_cast<std::size_t>(in.gcount()), h);
  return h;
}

inline std::string hex64(std::uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i, v >>= 4) out[static_cast<std::size_t>(i)] = digits[v & 0xf];
  return out;
}

}  // namespace rsmc
