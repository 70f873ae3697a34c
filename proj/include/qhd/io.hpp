#pragma once

#include <charconv>
#include <cmath>
#include <complex>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <json.hpp>
#include <string>
#include <vector>

#include "qhd/errors.hpp"

namespace qhd {

using json = nlohmann::json;

// 17 significant digits, C locale.
inline std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
  return std::string(buf, ptr);
}

// Non-finite values have no JSON literal; they become null.
inline json jnum(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

inline json jcomplex(std::complex<double> z) { return json::array({jnum(z.real()), jnum(z.imag())}); }

class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, std::initializer_list<const char*> header) : out_(path, std::ios::binary) {
    if (!out_) throw std::runtime_error("cannot open " + path.string());
    bool first = true;
    for (const char* h : header) {
      if (!first) out_ << ',';
      out_ << h;
      first = false;
    }
    out_ << '\n';
  }

  CsvWriter& cell(double x) {
    sep();
    out_ << format_double(x);
    return *this;
  }
  CsvWriter& cell(const std::string& s) {
    sep();
    out_ << s;
    return *this;
  }
  void end_row() {
    out_ << '\n';
    fresh_ = true;
  }

 private:
  void sep() {
    if (!fresh_) out_ << ',';
    fresh_ = false;
  }
  std::ofstream out_;
  bool fresh_ = true;
};

inline void write_json(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  out << j.dump(2) << '\n';
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  return std::string(std::istreambuf_iterator<char>(in), {});
}

}  // namespace qhd
