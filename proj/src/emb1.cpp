#include <algorithm>
#include <bit>
#include <fstream>
#include <iterator>

#include "tdha/data.hpp"
#include "tdha/error.hpp"

namespace tdha {

namespace {

constexpr std::uint8_t kMagic[4] = {'E', 'M', 'B', '1'};

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint32_t get_u32(std::span<const std::uint8_t> bytes, std::size_t offset) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(bytes[offset + i]) << (8 * i);
  return v;
}

}  // namespace

Vector FloatMatrix::row_as_double(std::size_t i) const {
  const auto r = row(i);
  return Vector(r.begin(), r.end());
}

FloatMatrix FloatMatrix::from_rows(std::span<const Vector> rows, std::size_t cols) {
  FloatMatrix m;
  m.rows = rows.size();
  m.cols = cols;
  m.values.reserve(m.rows * cols);
  for (const auto& r : rows) {
    if (r.size() != cols) throw ShapeError("FloatMatrix::from_rows: ragged rows");
    for (double x : r) m.values.push_back(static_cast<float>(x));
  }
  return m;
}

std::vector<std::uint8_t> encode_emb1(const FloatMatrix& matrix) {
  if (matrix.values.size() != matrix.rows * matrix.cols) {
    throw ValidationError("EMB1: value count does not match rows x cols");
  }
  if (matrix.rows > 0xffffffffULL || matrix.cols > 0xffffffffULL) {
    throw ValidationError("EMB1: shape exceeds 32-bit header fields");
  }
  std::vector<std::uint8_t> out;
  out.reserve(kEmb1HeaderSize + 4 * matrix.values.size());
  for (std::uint8_t c : kMagic) out.push_back(c);
  put_u32(out, kEmb1Version);
  put_u32(out, static_cast<std::uint32_t>(matrix.rows));
  put_u32(out, static_cast<std::uint32_t>(matrix.cols));
  for (float f : matrix.values) put_u32(out, std::bit_cast<std::uint32_t>(f));
  return out;
}

FloatMatrix decode_emb1(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 4 || !std::equal(std::begin(kMagic), std::end(kMagic), bytes.begin())) {
    throw BadMagicError("EMB1: missing 'EMB1' magic bytes");
  }
  if (bytes.size() < kEmb1HeaderSize) {
    throw TruncatedPayloadError("EMB1: header shorter than 16 bytes");
  }
  const std::uint32_t version = get_u32(bytes, 4);
  if (version != kEmb1Version) {
    throw UnsupportedVersionError("EMB1: unsupported version " + std::to_string(version));
  }
  FloatMatrix m;
  m.rows = get_u32(bytes, 8);
  m.cols = get_u32(bytes, 12);
  const std::size_t expected = kEmb1HeaderSize + 4 * m.rows * m.cols;
  if (bytes.size() < expected) {
    throw TruncatedPayloadError("EMB1: payload has " + std::to_string(bytes.size()) +
                                " bytes, header promises " + std::to_string(expected));
  }
  if (bytes.size() > expected) {
    throw ValidationError("EMB1: " + std::to_string(bytes.size() - expected) +
                          " trailing bytes after payload");
  }
  m.values.resize(m.rows * m.cols);
  for (std::size_t i = 0; i < m.values.size(); ++i) {
    m.values[i] = std::bit_cast<float>(get_u32(bytes, kEmb1HeaderSize + 4 * i));
  }
  return m;
}

void write_emb1(const std::filesystem::path& path, const FloatMatrix& matrix) {
  const auto bytes = encode_emb1(matrix);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed: " + path.string());
}

FloatMatrix read_emb1(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  try {
    return decode_emb1(bytes);
  } catch (const DataError& e) {
    // re-throw with the file name attached, same type
    const std::string msg = path.string() + ": " + e.what();
    if (dynamic_cast<const BadMagicError*>(&e)) throw BadMagicError(msg);
    if (dynamic_cast<const UnsupportedVersionError*>(&e)) throw UnsupportedVersionError(msg);
    if (dynamic_cast<const TruncatedPayloadError*>(&e)) throw TruncatedPayloadError(msg);
    throw ValidationError(msg);
  }
}

}  // namespace tdha
