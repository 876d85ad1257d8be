#pragma once

#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace locgap {

using CsvValue = std::variant<long long, double, std::string>;

/*
 * Minimal CSV writer with stable formatting: doubles are printed with
 * %.17g so identical runs produce identical bytes.
 */
class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& columns) : out_(path) {
    if (!out_) throw std::runtime_error("CsvWriter: cannot open " + path);
    for (std::size_t i = 0; i < columns.size(); ++i) {
      if (i) out_ << ',';
      out_ << columns[i];
    }
    out_ << '\n';
  }

  void row(std::initializer_list<CsvValue> values) {
    bool first = true;
    for (const auto& v : values) {
      if (!first) out_ << ',';
      first = false;
      if (std::holds_alternative<long long>(v)) {
        out_ << std::get<long long>(v);
      } else if (std::holds_alternative<double>(v)) {
        char buf[40];
        std::snprintf(buf, sizeof(buf), "%.17g", std::get<double>(v));
        out_ << buf;
      } else {
        out_ << std::get<std::string>(v);
      }
    }
    out_ << '\n';
  }

 private:
  std::ofstream out_;
};

}  // namespace locgap
