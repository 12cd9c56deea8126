#pragma once

#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <string>
#include <vector>

#include "rtwave/nonlinear.hpp"

namespace rtwave {

/// Fixed 17-significant-digit formatting used by every CSV writer.
std::string format_double(double v);

class CsvWriter {
 public:
  /// Every row is flushed, so the file is complete whenever the writer is idle.
  CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& columns);
  void row(const std::vector<double>& values);
  /// Row whose leading fields are text, followed by numbers.
  void row(const std::vector<std::string>& labels, const std::vector<double>& values);

 private:
  std::ofstream out_;
  std::size_t ncols_;
};

void write_json(const std::filesystem::path& path, const nlohmann::json& j);

/// Binary checkpoint: magic "RTWCKPT1", grid sizes (n_h, n_v+, n_v-), time,
/// then q, u1..u3 (upper then lower layer) and eta+, eta- as little-endian
/// complex doubles in storage order.
void write_checkpoint(const std::filesystem::path& path, const FlattenedState& s);
FlattenedState read_checkpoint(const std::filesystem::path& path, const GridPtr& grid);

std::string sha256_hex(const std::string& bytes);
std::string sha256_file(const std::filesystem::path& path);

/// Output directory written through a staging directory next to it. Nothing
/// appears at the final path until commit(); an uncommitted stage is removed.
class StagedOutput {
 public:
  explicit StagedOutput(std::filesystem::path final_dir);
  ~StagedOutput();
  StagedOutput(const StagedOutput&) = delete;
  StagedOutput& operator=(const StagedOutput&) = delete;

  const std::filesystem::path& dir() const { return stage_; }
  std::filesystem::path path(const std::string& name) const { return stage_ / name; }
  /// Writes MANIFEST.json listing every staged file with its SHA-256, then
  /// moves the stage to the final path (replacing an earlier run).
  void commit(const nlohmann::json& manifest_info);

 private:
  std::filesystem::path final_, stage_;
  bool committed_ = false;
};

}  // namespace rtwave
