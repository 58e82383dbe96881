#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "tgf/spectral_field.hpp"

namespace tgf::app {

const char* version();

// Shortest text that reads back to the same double.
std::string fmt(double x);

/// Output directory of one command run. Every file written through it
/// carries the config hash and the artifact version, and is listed in the
/// manifest.
class Output {
 public:
  Output(std::filesystem::path dir, std::string command, std::string hash);

  const std::string& hash() const { return hash_; }
  const std::vector<std::string>& files() const { return files_; }

  // First line "# config_hash=<hash>, version=<v>, command=<c>", then the
  // header row, then rows.
  void csv(const std::string& name, const std::vector<std::string>& header,
           const std::vector<std::vector<std::string>>& rows);
  // Adds "config_hash" and "version" to the object before writing.
  void json(const std::string& name, nlohmann::json body);
  void fields(const std::string& name, const WaveGrid& grid, double dt, const std::vector<SpectralField>& records);
  void manifest(const nlohmann::json& config);

 private:
  std::filesystem::path dir_;
  std::string command_, hash_;
  std::vector<std::string> files_;
  std::ofstream open(const std::string& name, bool binary);
};

/// Little-endian coefficient records:
///   char[8]  magic "TGFCOEF1"
///   u32 dim, u32 n_max, u32 steps, f64 dt
///   u32 records, u32 components, u64 modes
///   char[64] config hash (hex), u32 version length, version bytes
///   records x components x modes x (f64 re, f64 im), modes in grid index order
struct FieldRecords {
  int dim = 0, n_max = 0, steps = 0;
  double dt = 0.0;
  std::string hash, version;
  std::vector<SpectralField> records;
};
FieldRecords read_field_records(const std::filesystem::path& path);

}  // namespace tgf::app
