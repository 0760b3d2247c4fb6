#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "clra/pipeline.hpp"

namespace clra {

// Container layout (version 1, all integers little-endian):
//   "CLRA"  magic
//   u16     format version
//   u32 x6  rows, cols, patch_size, stride, cluster count, MAX
//   per cluster:
//     u32       N (patches)
//     u32       r (rank)
//     f64       beta
//     u32 pairs patch positions (row, col), N of them
//     f32       U (N x r), S (r), Vt (r x p^2), row-major
// Factors are quantized to f32 exactly once, on write; the element-count
// compression accounting is unaffected by the narrower storage type.
std::vector<std::uint8_t> serialize_archive(const CompressedImage& image);

// Parses bytes back into a CompressedImage whose factors carry the f32
// values (as doubles). Throws FormatError on bad magic, unsupported
// version, truncation, or inconsistent field values.
CompressedImage deserialize_archive(const std::vector<std::uint8_t>& bytes);

void write_archive(const std::string& path, const CompressedImage& image);
CompressedImage read_archive(const std::string& path);

// Cheap check for dispatching paths that accept either images or archives.
bool looks_like_archive(const std::string& path);

}  // namespace clra
