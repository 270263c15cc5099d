#include "acfh/snapshot.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

namespace acfh {

static_assert(std::endian::native == std::endian::little, "snapshot I/O assumes a little-endian host");

namespace {

constexpr char kMagic[4] = {'A', 'C', 'F', 'H'};
constexpr std::size_t kHeaderBytes = 24;

template <class T>
void put(std::vector<std::uint8_t>& out, T v) {
  std::uint8_t buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  out.insert(out.end(), buf, buf + sizeof(T));
}

template <class T>
T get(std::span<const std::uint8_t> bytes, std::size_t offset, const char* what) {
  if (offset + sizeof(T) > bytes.size()) throw ParseError(std::string("truncated snapshot: missing ") + what, offset);
  T v;
  std::memcpy(&v, bytes.data() + offset, sizeof(T));
  return v;
}

}  // namespace

std::vector<std::uint8_t> encode_snapshot(const Field& u) {
  std::vector<std::uint8_t> out;
  out.reserve(kHeaderBytes + 8 * u.size());
  out.insert(out.end(), std::begin(kMagic), std::end(kMagic));
  put<std::uint32_t>(out, kSnapshotVersion);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(u.spec().dim));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(u.spec().n));
  put<double>(out, u.spec().length);
  const auto* raw = reinterpret_cast<const std::uint8_t*>(u.data());
  out.insert(out.end(), raw, raw + 8 * u.size());
  return out;
}

Field decode_snapshot(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 4) throw ParseError("truncated snapshot: missing magic", 0);
  if (std::memcmp(bytes.data(), kMagic, 4) != 0) throw ParseError("bad snapshot magic", 0);
  const auto version = get<std::uint32_t>(bytes, 4, "version");
  if (version != kSnapshotVersion) throw ParseError("unsupported snapshot version " + std::to_string(version), 4);
  const auto dim = get<std::uint32_t>(bytes, 8, "dim");
  if (dim != 2 && dim != 3) throw ParseError("snapshot dim must be 2 or 3", 8);
  const auto n = get<std::uint32_t>(bytes, 12, "N");
  if (n < 2 || n > (1u << 16)) throw ParseError("snapshot N out of range", 12);
  const auto length = get<double>(bytes, 16, "L");
  if (!(length > 0.0) || !std::isfinite(length)) throw ParseError("snapshot L must be positive", 16);
  const GridSpec spec = GridSpec::make(static_cast<int>(dim), length, static_cast<int>(n));
  const std::size_t payload = 8 * spec.cells();
  if (bytes.size() < kHeaderBytes + payload) throw ParseError("truncated snapshot payload", bytes.size());
  if (bytes.size() > kHeaderBytes + payload) throw ParseError("trailing bytes after snapshot payload", kHeaderBytes + payload);
  std::vector<double> values(spec.cells());
  std::memcpy(values.data(), bytes.data() + kHeaderBytes, payload);
  return Field(spec, std::move(values));
}

void save_snapshot(const std::filesystem::path& path, const Field& u) {
  const auto bytes = encode_snapshot(u);
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
  os.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!os) throw std::runtime_error("failed writing " + path.string());
}

Field load_snapshot(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
  return decode_snapshot(bytes);
}

}  // namespace acfh
