#pragma once

#include <charconv>
#include <initializer_list>
#include <string>
#include <string_view>
#include <vector>

namespace hpmg {

// Minimal CSV emitter. Doubles are written with std::to_chars (shortest
// representation that round-trips), which keeps output byte-stable across
// runs with identical inputs.
class CsvWriter {
 public:
  void header(std::initializer_list<std::string_view> names) {
    bool first = true;
    for (auto n : names) {
      if (!first) out_ += ',';
      out_ += n;
      first = false;
    }
    out_ += '\n';
  }

  void header_row(const std::vector<std::string>& names) {
    bool first = true;
    for (const auto& n : names) {
      if (!first) out_ += ',';
      out_ += n;
      first = false;
    }
    out_ += '\n';
  }

  void field(double v) {
    sep();
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    out_.append(buf, ptr);
  }
  void field(long long v) {
    sep();
    out_ += std::to_string(v);
  }
  void field(int v) { field(static_cast<long long>(v)); }
  void field(std::string_view v) {
    sep();
    out_ += v;
  }

  void end_row() {
    out_ += '\n';
    row_open_ = false;
  }

  const std::string& str() const { return out_; }

 private:
  void sep() {
    if (row_open_) out_ += ',';
    row_open_ = true;
  }

  std::string out_;
  bool row_open_ = false;
};

}  // namespace hpmg
