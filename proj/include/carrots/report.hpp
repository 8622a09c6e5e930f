#pragma once

// Serialization of experiment results: CSV tables, versioned JSON, SVG
// figures, and the run manifest with content digests.

#include "carrots/carrot_field.hpp"
#include "carrots/inequality.hpp"

#include <json.hpp>

#include <filesystem>
#include <map>
#include <ostream>
#include <string>
#include <vector>

namespace carrots {

inline constexpr int json_schema = 1;

/// 17 significant digits, so every double reads back exactly.
std::string format_number(double x);
std::string format_complex(Complex z);  // "re im"

void write_shrink_csv(std::ostream& out, const ShrinkTable& table);
void write_level_csv(std::ostream& out, const ShrinkTable& table);
void write_inequality_csv(std::ostream& out, const std::vector<InequalityReport>& reports);
void write_limb_csv(std::ostream& out, const LimbTable& table);

nlohmann::ordered_json to_json(const RayTrace& trace);
nlohmann::ordered_json to_json(const ShrinkTable& table);
nlohmann::ordered_json to_json(const InequalityReport& report);
nlohmann::ordered_json to_json(const std::vector<InequalityReport>& reports);
nlohmann::ordered_json to_json(const LimbTable& table);

struct FieldPicture {
  std::vector<std::vector<Complex>> equipotentials;
  std::vector<std::vector<Complex>> rays;
  std::vector<std::vector<Complex>> carrots;
  std::vector<Complex> tips;  // landing points: samples of the boundary of M
};

/// Parameter-plane picture of the stick field up to `level`.
FieldPicture carrot_field_picture(const ModelTriangle& t, int level, int density, const CarrotOptions& opt,
                                  int parallelism = 1);
std::string render_svg(const FieldPicture& picture);

/// Lowercase hex SHA-256.
std::string sha256_hex(const std::string& bytes);
std::string sha256_file(const std::filesystem::path& path);

/// Records the files a run writes; manifest.json merges with earlier runs
/// in the same directory.
class RunManifest {
 public:
  explicit RunManifest(std::filesystem::path dir) : dir_(std::move(dir)) {}

  /// Writes `content` to dir/name and records its digest.
  std::filesystem::path write(const std::string& name, const std::string& content);
  void task(const std::string& name, const std::string& status, double seconds);
  void set_config(const std::map<std::string, std::string>& config) { config_ = config; }
  void set_command(const std::string& command) { command_ = command; }
  /// Writes manifest.json; returns its path.
  std::filesystem::path save() const;

  const std::map<std::string, std::string>& digests() const { return files_; }

 private:
  std::filesystem::path dir_;
  std::string command_;
  std::map<std::string, std::string> config_;
  std::map<std::string, std::string> files_;
  std::vector<nlohmann::ordered_json> tasks_;
};

}  // namespace carrots
