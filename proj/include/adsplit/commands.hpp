#pragma once

#include <filesystem>
#include <ostream>
#include <string>

#include "adsplit/config.hpp"

namespace adsplit {

/// Runs one subcommand (run, study-order, study-dtstar, reference, theory)
/// and writes its CSV files into `out`. Progress and warnings go to `log`.
/// Throws StageError on failure.
void run_subcommand(const std::string& name, const RunConfig& cfg,
                    const std::filesystem::path& out, std::ostream& log);

class StageError : public Error {
 public:
  StageError(std::string stage, const std::string& what)
      : Error(stage + ": " + what), stage_(std::move(stage)) {}
  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

}  // namespace adsplit
