#include "ctmap/label_io.hpp"

#include "ctmap/tensor_io.hpp"

namespace ctmap {

void save_label_bundle(const std::filesystem::path& dir, const LabelBundle& bundle) {
  std::filesystem::create_directories(dir);
  write_tensor(dir / kKernelFile, to_tensor(bundle.kernel_map));
  write_tensor(dir / kTrainingMaskFile, to_tensor(bundle.training_mask));
  write_tensor(dir / kShiftFile, to_tensor(bundle.shift_field));
  write_tensor(dir / kInstanceIdFile, to_tensor(bundle.instance_id));
  write_tensor(dir / kKernelIdFile, to_tensor(bundle.kernel_id));
  write_tensor(dir / kReferenceFile, to_tensor(bundle.reference_mask));
  std::vector<std::uint8_t> flags;
  flags.reserve(bundle.instances.size());
  for (const auto& info : bundle.instances) {
    flags.push_back(static_cast<std::uint8_t>((info.ignore ? 1 : 0) | (info.has_kernel ? 2 : 0)));
  }
  write_tensor(dir / kInstancesFile, Tensor::from_bytes({static_cast<std::uint32_t>(flags.size())}, flags));
}

LabelBundle load_label_bundle(const std::filesystem::path& dir) {
  LabelBundle b;
  b.kernel_map = bit_mask_from(read_tensor(dir / kKernelFile));
  b.training_mask = bit_mask_from(read_tensor(dir / kTrainingMaskFile));
  b.shift_field = shift_field_from(read_tensor(dir / kShiftFile));
  b.instance_id = labeled_grid_from(read_tensor(dir / kInstanceIdFile));
  b.kernel_id = labeled_grid_from(read_tensor(dir / kKernelIdFile));
  b.reference_mask = bit_mask_from(read_tensor(dir / kReferenceFile));
  b.height = b.kernel_map.height();
  b.width = b.kernel_map.width();
  require_same_shape(b.kernel_map, b.training_mask, "training mask shape");
  require_same_shape(b.kernel_map, b.shift_field, "shift field shape");
  require_same_shape(b.kernel_map, b.instance_id.labels, "instance id shape");
  require_same_shape(b.kernel_map, b.kernel_id.labels, "kernel id shape");
  require_same_shape(b.kernel_map, b.reference_mask, "reference mask shape");

  const Tensor flags = read_tensor(dir / kInstancesFile);
  if (flags.dtype != DType::kUint8 || flags.dims.size() != 1) {
    throw Error(ErrorCode::kShapeMismatch, "instances tensor must be uint8 [N]");
  }
  for (std::size_t i = 0; i < flags.payload.size(); ++i) {
    const std::uint8_t f = flags.payload[i];
    b.instances.push_back({static_cast<int>(i), (f & 1) != 0, (f & 2) != 0, 0.0});
  }
  const int n = static_cast<int>(b.instances.size());
  if (b.instance_id.num_labels > n || b.kernel_id.num_labels > n) {
    throw Error(ErrorCode::kShapeMismatch, "label ids exceed the instance table");
  }
  b.instance_id.num_labels = n;
  b.kernel_id.num_labels = n;
  return b;
}

void save_prediction(const std::filesystem::path& dir, const PredictionMaps& pred) {
  std::filesystem::create_directories(dir);
  write_tensor(dir / kProbFile, to_tensor(pred.prob_map));
  write_tensor(dir / kShiftFile, to_tensor(pred.shift_field));
}

PredictionMaps load_prediction(const std::filesystem::path& prob_path, const std::filesystem::path& shift_path) {
  PredictionMaps pred{float_map_from(read_tensor(prob_path)), shift_field_from(read_tensor(shift_path))};
  require_same_shape(pred.prob_map, pred.shift_field, "probability and shift maps differ in shape");
  return pred;
}

}  // namespace ctmap
