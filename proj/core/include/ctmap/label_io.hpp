#pragma once

#include <filesystem>

#include "ctmap/decoder.hpp"
#include "ctmap/encoder.hpp"

namespace ctmap {

// Tensor file names used for label and prediction directories.
inline constexpr const char* kKernelFile = "kernel.ctmp";
inline constexpr const char* kTrainingMaskFile = "training_mask.ctmp";
inline constexpr const char* kShiftFile = "shift.ctmp";
inline constexpr const char* kInstanceIdFile = "instance_id.ctmp";
inline constexpr const char* kKernelIdFile = "kernel_id.ctmp";
inline constexpr const char* kReferenceFile = "reference.ctmp";
/// uint8 [N]: bit 0 = ignore, bit 1 = has_kernel.
inline constexpr const char* kInstancesFile = "instances.ctmp";
inline constexpr const char* kProbFile = "prob.ctmp";

void save_label_bundle(const std::filesystem::path& dir, const LabelBundle& bundle);
/// InstanceInfo::annotation_id and area are not stored; they load as
/// position and 0.
LabelBundle load_label_bundle(const std::filesystem::path& dir);

/// prob.ctmp (float32 H x W) and shift.ctmp (float32 H x W x 2).
void save_prediction(const std::filesystem::path& dir, const PredictionMaps& pred);
PredictionMaps load_prediction(const std::filesystem::path& prob_path, const std::filesystem::path& shift_path);

}  // namespace ctmap
