#include "ctmap/tensor_io.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

namespace ctmap {
namespace {

constexpr std::array<std::uint8_t, 4> kMagic{'C', 'T', 'M', 'P'};
constexpr std::size_t kFixedHeader = 7;

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint32_t get_u32(const std::uint8_t* p) {
  return static_cast<std::uint32_t>(p[0]) | static_cast<std::uint32_t>(p[1]) << 8 |
         static_cast<std::uint32_t>(p[2]) << 16 | static_cast<std::uint32_t>(p[3]) << 24;
}

std::vector<std::uint32_t> grid_dims(int h, int w) {
  return {static_cast<std::uint32_t>(h), static_cast<std::uint32_t>(w)};
}

void require_dims(const Tensor& t, std::size_t ndim, DType dtype, const char* what) {
  if (t.dtype != dtype) throw Error(ErrorCode::kUnsupportedDtype, std::string(what) + ": unexpected dtype");
  if (t.dims.size() != ndim) throw Error(ErrorCode::kShapeMismatch, std::string(what) + ": unexpected rank");
}

template <typename T>
Grid<T> grid_from(const Tensor& t) {
  constexpr std::uint32_t kMaxSide = 1U << 20;
  if (t.dims[0] > kMaxSide || t.dims[1] > kMaxSide) throw Error(ErrorCode::kShapeMismatch, "map side too large");
  return Grid<T>(static_cast<int>(t.dims[0]), static_cast<int>(t.dims[1]));
}

}  // namespace

std::size_t dtype_size(DType dtype) {
  switch (dtype) {
    case DType::kFloat32: return 4;
    case DType::kUint8: return 1;
  }
  throw Error(ErrorCode::kUnsupportedDtype, "unknown dtype");
}

std::size_t Tensor::element_count() const {
  std::size_t n = 1;
  for (auto d : dims) n *= d;
  return n;
}

Tensor Tensor::from_floats(std::vector<std::uint32_t> dims, std::span<const float> values) {
  Tensor t{DType::kFloat32, std::move(dims), {}};
  if (t.element_count() != values.size()) throw Error(ErrorCode::kShapeMismatch, "value count does not match dims");
  t.payload.reserve(values.size() * 4);
  for (float v : values) put_u32(t.payload, std::bit_cast<std::uint32_t>(v));
  return t;
}

Tensor Tensor::from_bytes(std::vector<std::uint32_t> dims, std::span<const std::uint8_t> values) {
  Tensor t{DType::kUint8, std::move(dims), {values.begin(), values.end()}};
  if (t.element_count() != values.size()) throw Error(ErrorCode::kShapeMismatch, "value count does not match dims");
  return t;
}

std::vector<float> Tensor::to_floats() const {
  if (dtype != DType::kFloat32) throw Error(ErrorCode::kUnsupportedDtype, "tensor is not float32");
  std::vector<float> out(payload.size() / 4);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::bit_cast<float>(get_u32(&payload[4 * i]));
  return out;
}

std::vector<std::uint8_t> serialize_tensor(const Tensor& tensor) {
  if (tensor.dims.size() > 255) throw Error(ErrorCode::kInvalidArgument, "too many dimensions");
  if (tensor.payload.size() != tensor.element_count() * dtype_size(tensor.dtype)) {
    throw Error(ErrorCode::kShapeMismatch, "payload size does not match dims");
  }
  std::vector<std::uint8_t> out(kMagic.begin(), kMagic.end());
  out.push_back(kTensorVersion);
  out.push_back(static_cast<std::uint8_t>(tensor.dtype));
  out.push_back(static_cast<std::uint8_t>(tensor.dims.size()));
  for (auto d : tensor.dims) put_u32(out, d);
  out.insert(out.end(), tensor.payload.begin(), tensor.payload.end());
  return out;
}

Tensor parse_tensor(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kMagic.size() || !std::equal(kMagic.begin(), kMagic.end(), bytes.begin())) {
    throw Error(ErrorCode::kBadMagic, "not a CTMP tensor");
  }
  if (bytes.size() < kFixedHeader) throw Error(ErrorCode::kTruncatedPayload, "header cut short");
  if (bytes[4] != kTensorVersion) throw Error(ErrorCode::kBadVersion, "version " + std::to_string(bytes[4]));
  if (bytes[5] > static_cast<std::uint8_t>(DType::kUint8)) {
    throw Error(ErrorCode::kUnsupportedDtype, "dtype code " + std::to_string(bytes[5]));
  }
  Tensor t;
  t.dtype = static_cast<DType>(bytes[5]);
  const std::size_t ndim = bytes[6];
  const std::size_t header = kFixedHeader + 4 * ndim;
  if (bytes.size() < header) throw Error(ErrorCode::kTruncatedPayload, "dims cut short");
  for (std::size_t i = 0; i < ndim; ++i) t.dims.push_back(get_u32(&bytes[kFixedHeader + 4 * i]));

  std::size_t expected = dtype_size(t.dtype);
  for (auto d : t.dims) {
    if (__builtin_mul_overflow(expected, static_cast<std::size_t>(d), &expected)) {
      throw Error(ErrorCode::kTruncatedPayload, "dims describe more data than any file can hold");
    }
  }
  const std::size_t available = bytes.size() - header;
  if (available < expected) {
    throw Error(ErrorCode::kTruncatedPayload,
                "expected " + std::to_string(expected) + " payload bytes, found " + std::to_string(available));
  }
  if (available > expected) {
    throw Error(ErrorCode::kTrailingData, std::to_string(available - expected) + " bytes after payload");
  }
  t.payload.assign(bytes.begin() + static_cast<std::ptrdiff_t>(header), bytes.end());
  return t;
}

void write_tensor(const std::filesystem::path& path, const Tensor& tensor) {
  const auto bytes = serialize_tensor(tensor);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIoError, "cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::kIoError, "failed writing " + path.string());
}

Tensor read_tensor(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  const std::vector<std::uint8_t> bytes{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  return parse_tensor(bytes);
}

Tensor to_tensor(const FloatMap& map) { return Tensor::from_floats(grid_dims(map.height(), map.width()), map.cells()); }

Tensor to_tensor(const Grid<double>& map) {
  std::vector<float> values(map.cells().begin(), map.cells().end());
  return Tensor::from_floats(grid_dims(map.height(), map.width()), values);
}

Tensor to_tensor(const ShiftField& field) {
  const std::span<const float> values(reinterpret_cast<const float*>(field.cells().data()), field.size() * 2);
  return Tensor::from_floats({static_cast<std::uint32_t>(field.height()), static_cast<std::uint32_t>(field.width()), 2},
                             values);
}

Tensor to_tensor(const Grid<std::array<double, 2>>& field) {
  std::vector<float> values;
  values.reserve(field.size() * 2);
  for (const auto& g : field.cells()) {
    values.push_back(static_cast<float>(g[0]));
    values.push_back(static_cast<float>(g[1]));
  }
  return Tensor::from_floats({static_cast<std::uint32_t>(field.height()), static_cast<std::uint32_t>(field.width()), 2},
                             values);
}

Tensor to_tensor(const BitMask& mask) { return Tensor::from_bytes(grid_dims(mask.height(), mask.width()), mask.cells()); }

Tensor to_tensor(const LabeledGrid& labels) {
  std::vector<float> values(labels.labels.cells().begin(), labels.labels.cells().end());
  return Tensor::from_floats(grid_dims(labels.height(), labels.width()), values);
}

FloatMap float_map_from(const Tensor& t) {
  require_dims(t, 2, DType::kFloat32, "probability map");
  FloatMap map = grid_from<float>(t);
  const auto values = t.to_floats();
  std::copy(values.begin(), values.end(), map.cells().begin());
  return map;
}

ShiftField shift_field_from(const Tensor& t) {
  require_dims(t, 3, DType::kFloat32, "shift field");
  if (t.dims[2] != 2) throw Error(ErrorCode::kShapeMismatch, "shift field must be H x W x 2");
  ShiftField field = grid_from<Shift>(t);
  const auto values = t.to_floats();
  for (std::size_t i = 0; i < field.size(); ++i) field[i] = Shift{values[2 * i], values[2 * i + 1]};
  return field;
}

BitMask bit_mask_from(const Tensor& t) {
  require_dims(t, 2, DType::kUint8, "mask");
  BitMask mask = grid_from<std::uint8_t>(t);
  for (std::size_t i = 0; i < mask.size(); ++i) mask[i] = t.payload[i] != 0 ? 1 : 0;
  return mask;
}

LabeledGrid labeled_grid_from(const Tensor& t) {
  require_dims(t, 2, DType::kFloat32, "label map");
  LabeledGrid grid{grid_from<std::int32_t>(t), 0};
  const auto values = t.to_floats();
  for (std::size_t i = 0; i < grid.labels.size(); ++i) {
    const float v = values[i];
    if (!(v >= 0.0F && v < 16777216.0F) || v != static_cast<float>(static_cast<std::int32_t>(v))) {
      throw Error(ErrorCode::kParseError, "label map holds a non-integer or negative id");
    }
    grid.labels[i] = static_cast<std::int32_t>(v);
    grid.num_labels = std::max(grid.num_labels, grid.labels[i]);
  }
  return grid;
}

}  // namespace ctmap
