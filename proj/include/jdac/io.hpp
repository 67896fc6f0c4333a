#pragma once

#include <cstdint>
#include <filesystem>

#include "jdac/volume.hpp"

namespace jdac {

// Native container. Little-endian throughout:
//
//   offset  size  field
//        0     4  magic "RVOL"
//        4     4  u32 version (= 1)
//        8    12  u32 dims[3]
//       20    12  f32 spacing[3]
//       32     1  u8 residual flag
//       33     3  padding (zero)
//       36   4*N  f32 voxels, x fastest
inline constexpr std::uint32_t kRvolVersion = 1;
inline constexpr std::size_t kRvolHeaderBytes = 36;

/// Voxels are narrowed to float32; a volume holding float-representable
/// values round-trips bit-exactly.
void write_rvol(const Volume& v, const std::filesystem::path& path);
Volume read_rvol(const std::filesystem::path& path);

/// NIfTI-1 single-file reader (".nii" or gzipped ".nii.gz"), one 3D frame,
/// float32 or int16. int16 data is rescaled by scl_slope/scl_inter and then
/// min-max normalised to [0, 1]; float32 data only gets the slope/intercept.
/// Orientation and affine fields are ignored.
Volume read_nifti(const std::filesystem::path& path);

/// Picks the reader from the extension (.nii / .nii.gz vs anything else).
Volume read_volume(const std::filesystem::path& path);

} // namespace jdac
