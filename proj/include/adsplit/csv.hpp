#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "adsplit/controller.hpp"
#include "adsplit/field_state.hpp"

namespace adsplit {

/// Scientific notation with 17 significant digits.
std::string format_double(double v);

/// Writes `path` through a sibling `<path>.partial` that is renamed into
/// place by commit(). An uncommitted file keeps its `.partial` name.
class CsvWriter {
 public:
  CsvWriter(std::filesystem::path path, const std::vector<std::string>& header);
  CsvWriter(const CsvWriter&) = delete;
  CsvWriter& operator=(const CsvWriter&) = delete;

  CsvWriter& operator<<(double v);
  CsvWriter& operator<<(const std::string& v);
  CsvWriter& operator<<(const char* v) { return *this << std::string(v); }
  CsvWriter& operator<<(std::size_t v);
  void end_row();
  void commit();

 private:
  void separator();

  std::filesystem::path path_;
  std::filesystem::path partial_;
  std::ofstream out_;
  std::size_t columns_;
  std::size_t column_ = 0;
};

void write_state_csv(const std::filesystem::path& path, const FieldState& state,
                     const std::vector<std::string>& names);
void write_steps_csv(const std::filesystem::path& path, const std::vector<StepRecord>& log);

}  // namespace adsplit
