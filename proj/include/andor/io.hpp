#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "andor/dynamics.hpp"
#include "andor/interaction.hpp"
#include "andor/table.hpp"
#include "andor/toy/network.hpp"

namespace andor::io {

namespace fs = std::filesystem;

inline constexpr int kTableFormatVersion = 1;
inline constexpr int kSpectrumFormatVersion = 1;
inline constexpr int kCheckpointFormatVersion = 1;
inline constexpr int kManifestFormatVersion = 1;
inline constexpr int kCsvVersion = 1;
inline constexpr std::string_view kMaskConvention = "bit i (LSB) = variable i present";

/// Malformed or inconsistent file contents. what() names the source.
class FormatError : public std::runtime_error {
 public:
  FormatError(const std::string& source, const std::string& message)
      : std::runtime_error(source + ": " + message), source_(source) {}
  const std::string& source() const { return source_; }

 private:
  std::string source_;
};

enum class Encoding { binary, text };

// Containers: "key value" header lines, a "---" line, then the payload as
// little-endian float64 (binary) or one shortest round-trip decimal per line.

std::string encode_table(const MaskedOutputTable& table, Encoding encoding = Encoding::binary);
MaskedOutputTable decode_table(std::string_view bytes, const std::string& source = "<memory>");

std::string encode_spectrum(const InteractionSpectrum& spectrum, Encoding encoding = Encoding::binary);
InteractionSpectrum decode_spectrum(std::string_view bytes, const std::string& source = "<memory>");

struct CheckpointBlob {
  toy::NetworkShape shape;
  int epoch = 0;
  std::vector<double> parameters;
};

std::string encode_checkpoint(const CheckpointBlob& blob);
CheckpointBlob decode_checkpoint(std::string_view bytes, const std::string& source = "<memory>");

std::string read_file(const fs::path& path);
/// Writes to a sibling temporary file and renames it over the target.
void write_file_atomic(const fs::path& path, std::string_view bytes);

void write_table(const fs::path& path, const MaskedOutputTable& table, Encoding encoding = Encoding::binary);
MaskedOutputTable read_table(const fs::path& path);
void write_spectrum(const fs::path& path, const InteractionSpectrum& spectrum,
                    Encoding encoding = Encoding::binary);
InteractionSpectrum read_spectrum(const fs::path& path);

struct ManifestEntry {
  std::string sample;
  std::string path;  ///< relative to the manifest's directory
};

struct ManifestEpoch {
  int epoch = 0;
  double train_loss = 0.0;
  double test_loss = 0.0;
  std::vector<ManifestEntry> tables;
};

struct SeriesManifest {
  int n = 0;
  std::vector<ManifestEpoch> epochs;
};

std::string encode_manifest(const SeriesManifest& manifest);
/// Parses and checks structure: increasing epochs, finite losses, the same
/// samples at every epoch.
SeriesManifest decode_manifest(std::string_view text, const std::string& source = "<memory>");
SeriesManifest read_manifest(const fs::path& path);
void write_manifest(const fs::path& path, const SeriesManifest& manifest);

/// Loads every referenced table and checks n, epoch and sample id against
/// the manifest. Paths resolve against base_dir.
std::vector<std::vector<MaskedOutputTable>> load_series_tables(const SeriesManifest& manifest,
                                                               const fs::path& base_dir);

// CSV: first line "# andor-<kind> v<version>", then a fixed header row.

std::string format_double(double x);

std::string orders_csv(const OrderProfile& profile);
std::string similarity_csv(std::span<const OrderSimilarity> curve);
std::string epoch_csv(std::span<const EpochRecord> series);
struct FusiformRow {
  int k = 0;
  double expected_pos = 0.0;
  double expected_neg = 0.0;
  double empirical_pos = 0.0;
  double empirical_neg = 0.0;
};
std::string fusiform_csv(std::span<const FusiformRow> rows);
/// Per-order strength of two sample groups side by side.
std::string group_orders_csv(const OrderProfile& a, const std::string& a_name, const OrderProfile& b,
                             const std::string& b_name);

}  // namespace andor::io
