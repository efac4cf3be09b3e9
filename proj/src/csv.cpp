#include "adsplit/csv.hpp"

#include <cstdio>

#include "adsplit/errors.hpp"

namespace adsplit {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", v);
  return buf;
}

CsvWriter::CsvWriter(std::filesystem::path path, const std::vector<std::string>& header)
    : path_(std::move(path)), columns_(header.size()) {
  partial_ = path_;
  partial_ += ".partial";
  out_.open(partial_, std::ios::binary | std::ios::trunc);
  if (!out_) throw Error("cannot write '" + partial_.string() + "'");
  for (const std::string& h : header) *this << h;
  end_row();
}

void CsvWriter::separator() {
  if (column_ > 0) out_ << ',';
  ++column_;
}

CsvWriter& CsvWriter::operator<<(double v) {
  separator();
  out_ << format_double(v);
  return *this;
}

CsvWriter& CsvWriter::operator<<(const std::string& v) {
  separator();
  out_ << v;
  return *this;
}

CsvWriter& CsvWriter::operator<<(std::size_t v) {
  separator();
  out_ << v;
  return *this;
}

void CsvWriter::end_row() {
  if (column_ != columns_) {
    throw Error("csv row width " + std::to_string(column_) + " does not match header width " +
                std::to_string(columns_) + " in '" + path_.string() + "'");
  }
  out_ << '\n';
  column_ = 0;
}

void CsvWriter::commit() {
  out_.close();
  if (!out_) throw Error("failed writing '" + partial_.string() + "'");
  std::filesystem::rename(partial_, path_);
}

void write_state_csv(const std::filesystem::path& path, const FieldState& state,
                     const std::vector<std::string>& names) {
  std::vector<std::string> header{"x"};
  header.insert(header.end(), names.begin(), names.end());
  CsvWriter w(path, header);
  for (std::size_t k = 0; k < state.points(); ++k) {
    w << state.grid().x(k);
    for (std::size_t j = 0; j < state.species(); ++j) w << state(j, k);
    w.end_row();
  }
  w.commit();
}

void write_steps_csv(const std::filesystem::path& path, const std::vector<StepRecord>& log) {
  CsvWriter w(path, {"t", "dt", "eps", "err", "dt_star", "C0", "omega", "accepted", "reason"});
  for (const StepRecord& r : log) {
    w << r.t << r.dt << r.eps << r.err << r.dt_star << r.c0 << r.omega
      << std::size_t(r.accepted ? 1 : 0) << to_string(r.note);
    w.end_row();
  }
  w.commit();
}

}  // namespace adsplit
