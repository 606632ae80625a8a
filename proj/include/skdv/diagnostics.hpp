#ifndef SKDV_DIAGNOSTICS_HPP
#define SKDV_DIAGNOSTICS_HPP

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "skdv/field.hpp"

namespace skdv {

// Shortest round-trip decimal representation; locale-independent, so the
// emitted CSV bytes are reproducible.
inline std::string fmt_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

struct DiagnosticsRow {
  std::uint64_t path_id = 0;
  double t = 0.0;
  double mass = 0.0;
  double momentum = 0.0;
  double energy = 0.0;
  double u_h1 = 0.0;
  double w_h1 = 0.0;
  double w_hneg38 = 0.0;
  double run_xnorm_u = std::numeric_limits<double>::quiet_NaN();
  double run_ynorm_v = std::numeric_limits<double>::quiet_NaN();
  bool stopped_u = false;
  bool stopped_v = false;
  bool blowup = false;
};

inline const char* diagnostics_header() {
  return "path_id,t,mass,momentum,energy,u_h1,w_h1,w_hneg38,run_xnorm_u,run_ynorm_v,"
         "stopped_u,stopped_v,blowup";
}

inline std::string to_csv(const DiagnosticsRow& r) {
  std::string s;
  s.reserve(200);
  s += std::to_string(r.path_id);
  s += ',';
  s += fmt_double(r.t);
  for (double v : {r.mass, r.momentum, r.energy, r.u_h1, r.w_h1, r.w_hneg38, r.run_xnorm_u,
                   r.run_ynorm_v}) {
    s += ',';
    s += fmt_double(v);
  }
  s += r.stopped_u ? ",1" : ",0";
  s += r.stopped_v ? ",1" : ",0";
  s += r.blowup ? ",1" : ",0";
  return s;
}

class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::string& header) : out_(path) {
    if (!out_) throw std::runtime_error("cannot open output file: " + path.string());
    out_ << header << "\n";
  }
  void line(const std::string& s) { out_ << s << "\n"; }
  template <class... Cols>
  void row(const Cols&... cols) {
    bool first = true;
    ((out_ << (first ? "" : ","), first = false, write_cell(cols)), ...);
    out_ << "\n";
  }

 private:
  void write_cell(double v) { out_ << fmt_double(v); }
  void write_cell(int v) { out_ << v; }
  void write_cell(std::uint64_t v) { out_ << v; }
  void write_cell(const std::string& v) { out_ << v; }
  void write_cell(const char* v) { out_ << v; }
  std::ofstream out_;
};

} // namespace skdv

#endif
