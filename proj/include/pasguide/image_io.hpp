#ifndef PASGUIDE_IMAGE_IO_HPP
#define PASGUIDE_IMAGE_IO_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "pasguide/image.hpp"

namespace pasguide {

// 8-bit PNG (gray or RGB) and JPEG load/save. Loading maps [0,255] -> [0,1]
// by division; saving clamps to [0,1] and rounds half-up.

Image load_png(const std::string& path);
void save_png(const Image& img, const std::string& path);

Image load_jpeg(const std::string& path);
void save_jpeg(const Image& img, const std::string& path, int quality = 95);

// Dispatch by extension (.png/.jpg/.jpeg, case-insensitive).
Image load_image(const std::string& path);

// In-memory JPEG encode/decode through libjpeg, the codec pinned repo-wide so
// the degradation pipeline is bit-exact for fixed inputs.
std::vector<std::uint8_t> jpeg_encode(const Image& img, int quality);
Image jpeg_decode(const std::vector<std::uint8_t>& bytes);
Image jpeg_roundtrip(const Image& img, int quality);

std::uint8_t quantize_u8(double v);

}  // namespace pasguide

#endif
