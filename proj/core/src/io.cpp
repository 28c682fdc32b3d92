#include "kflow/io.hpp"

#include <openssl/evp.h>

#include <bit>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <memory>
#include <sstream>

#include <json.hpp>

#include "kflow/error.hpp"

namespace kflow {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::uint64_t to_little(std::uint64_t v) {
  if constexpr (std::endian::native == std::endian::big) {
    std::uint64_t r = 0;
    for (int i = 0; i < 8; ++i) r |= ((v >> (8 * i)) & 0xffu) << (8 * (7 - i));
    return r;
  }
  return v;
}

std::string kind_name(SnapshotKind k) { return k == SnapshotKind::Vorticity ? "vorticity" : "stream"; }

}  // namespace

fs::path write_snapshot(const fs::path& base, const SpectralField& field, SnapshotKind kind,
                        double time) {
  const auto& g = field.grid();
  if (!field.is_hermitian(1e-10)) {
    throw ValidationError("snapshot: field is not real-valued (Hermitian check failed)");
  }
  fs::path sidecar = base;
  sidecar += ".json";
  fs::path bin = base;
  bin += ".bin";
  const json meta = {{"alpha", g.alpha()}, {"nx", g.nx()},   {"ny", g.ny()},
                     {"kind", kind_name(kind)}, {"time", time}, {"endianness", "little"}};
  write_text_file(sidecar, meta.dump(2) + "\n");

  const auto values = field.to_physical_real();
  std::string bytes(values.size() * 8, '\0');
  for (std::size_t i = 0; i < values.size(); ++i) {
    const std::uint64_t v = to_little(std::bit_cast<std::uint64_t>(values[i]));
    std::memcpy(bytes.data() + 8 * i, &v, 8);
  }
  write_text_file(bin, bytes);
  return sidecar;
}

LoadedSnapshot read_snapshot(const fs::path& sidecar) {
  json meta;
  try {
    meta = json::parse(read_text_file(sidecar));
  } catch (const json::exception& e) {
    throw ValidationError("snapshot " + sidecar.string() + ": " + e.what());
  }
  for (const char* key : {"alpha", "nx", "ny", "kind", "time", "endianness"}) {
    if (!meta.contains(key)) throw ValidationError("snapshot sidecar lacks '" + std::string(key) + "'");
  }
  if (meta["endianness"] != "little") throw ValidationError("snapshot: endianness must be 'little'");
  LoadedSnapshot out{SnapshotMeta{}, SpectralField(TorusGrid(1.0, 4, 4))};
  out.meta.alpha = meta["alpha"].get<double>();
  out.meta.nx = meta["nx"].get<int>();
  out.meta.ny = meta["ny"].get<int>();
  out.meta.time = meta["time"].get<double>();
  const std::string kind = meta["kind"].get<std::string>();
  if (kind == "vorticity") {
    out.meta.kind = SnapshotKind::Vorticity;
  } else if (kind == "stream") {
    out.meta.kind = SnapshotKind::Stream;
  } else {
    throw ValidationError("snapshot: kind must be 'vorticity' or 'stream'");
  }
  const TorusGrid g(out.meta.alpha, out.meta.nx, out.meta.ny);
  fs::path bin = sidecar;
  bin.replace_extension(".bin");
  const std::string bytes = read_text_file(bin);
  if (bytes.size() != g.size() * 8) {
    throw ValidationError("snapshot: " + bin.string() + " has " + std::to_string(bytes.size()) +
                          " bytes, expected " + std::to_string(g.size() * 8));
  }
  std::vector<double> values(g.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    std::uint64_t v;
    std::memcpy(&v, bytes.data() + 8 * i, 8);
    values[i] = std::bit_cast<double>(to_little(v));
  }
  out.field = SpectralField::from_physical(g, std::span<const double>(values));
  return out;
}

void write_series_csv(const fs::path& path, const TimeSeriesRecord& rec) {
  std::ostringstream os;
  rec.write_csv(os);
  write_text_file(path, os.str());
}

TimeSeriesRecord read_series_csv(const fs::path& path) {
  std::istringstream is(read_text_file(path));
  return TimeSeriesRecord::read_csv(is);
}

void write_text_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw ValidationError("cannot open '" + path.string() + "' for writing");
  os.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!os) throw ValidationError("write failed for '" + path.string() + "'");
}

std::string read_text_file(const fs::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ValidationError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

std::string sha256_hex(const std::string& bytes) {
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), bytes.data(), bytes.size()) != 1 ||
      EVP_DigestFinal_ex(ctx.get(), digest, &len) != 1) {
    throw Error("SHA-256 computation failed");
  }
  std::ostringstream os;
  for (unsigned int i = 0; i < len; ++i) {
    os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
  }
  return os.str();
}

std::string sha256_file(const fs::path& path) { return sha256_hex(read_text_file(path)); }

}  // namespace kflow
