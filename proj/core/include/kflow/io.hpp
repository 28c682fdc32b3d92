#pragma once

#include <filesystem>
#include <string>

#include "kflow/field.hpp"
#include "kflow/series.hpp"

namespace kflow {

enum class SnapshotKind { Vorticity, Stream };

struct SnapshotMeta {
  double alpha = 1.0;
  int nx = 0;
  int ny = 0;
  SnapshotKind kind = SnapshotKind::Vorticity;
  double time = 0.0;
};

struct LoadedSnapshot {
  SnapshotMeta meta;
  SpectralField field;
};

/// Writes <base>.json and <base>.bin (float64 little-endian, ny rows of nx).
/// Returns the path of the sidecar.
std::filesystem::path write_snapshot(const std::filesystem::path& base, const SpectralField& field,
                                     SnapshotKind kind, double time);
/// Reads a snapshot from its JSON sidecar; the binary sits next to it with
/// the .bin extension.
LoadedSnapshot read_snapshot(const std::filesystem::path& sidecar);

void write_series_csv(const std::filesystem::path& path, const TimeSeriesRecord& rec);
TimeSeriesRecord read_series_csv(const std::filesystem::path& path);

void write_text_file(const std::filesystem::path& path, const std::string& text);
std::string read_text_file(const std::filesystem::path& path);

/// Lower-case hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& path);
std::string sha256_hex(const std::string& bytes);

}  // namespace kflow
