#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "ctmap/grid.hpp"

namespace ctmap {

// Binary container:
//   "CTMP" | u8 version (1) | u8 dtype (0 float32, 1 uint8) | u8 ndim |
//   ndim x u32 LE dims | row-major LE payload, tightly packed.

enum class DType : std::uint8_t { kFloat32 = 0, kUint8 = 1 };

inline constexpr std::uint8_t kTensorVersion = 1;

std::size_t dtype_size(DType dtype);

struct Tensor {
  DType dtype = DType::kFloat32;
  std::vector<std::uint32_t> dims;
  /// Payload exactly as stored: little-endian, row-major.
  std::vector<std::uint8_t> payload;

  std::size_t element_count() const;
  bool operator==(const Tensor&) const = default;

  static Tensor from_floats(std::vector<std::uint32_t> dims, std::span<const float> values);
  static Tensor from_bytes(std::vector<std::uint32_t> dims, std::span<const std::uint8_t> values);
  std::vector<float> to_floats() const;
};

std::vector<std::uint8_t> serialize_tensor(const Tensor& tensor);

/// Throws BadMagic, BadVersion, UnsupportedDtype, TruncatedPayload, or
/// TrailingData.
Tensor parse_tensor(std::span<const std::uint8_t> bytes);

void write_tensor(const std::filesystem::path& path, const Tensor& tensor);
Tensor read_tensor(const std::filesystem::path& path);

Tensor to_tensor(const FloatMap& map);
Tensor to_tensor(const Grid<double>& map);  // stored as float32
Tensor to_tensor(const ShiftField& field);
Tensor to_tensor(const Grid<std::array<double, 2>>& field);  // stored as float32
Tensor to_tensor(const BitMask& mask);
Tensor to_tensor(const LabeledGrid& labels);  // float32 ids

FloatMap float_map_from(const Tensor& t);
ShiftField shift_field_from(const Tensor& t);
BitMask bit_mask_from(const Tensor& t);
LabeledGrid labeled_grid_from(const Tensor& t);

}  // namespace ctmap
