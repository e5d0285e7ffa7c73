#pragma once

#include <string>

#include "relight/image.hpp"

namespace relight {

// 8-bit PNG <-> display-referred samples, mapped via round(255*v).
SrgbImage read_png(const std::string& path);
void write_png(const std::string& path, const SrgbImage& img);

// 32-bit float scanline EXR with ZIP compression, channels R,G,B(,A).
LinearImage read_exr(const std::string& path);
void write_exr(const std::string& path, const LinearImage& img);

// Portable float map, little-endian (scale -1.0). "PF" for color,
// "Pf" for single-channel.
LinearImage read_pfm(const std::string& path);
void write_pfm(const std::string& path, const LinearImage& img);

// Extension-dispatched helpers: .exr/.pfm are linear, .png is sRGB.
bool is_linear_extension(const std::string& path);
LinearImage read_linear_image(const std::string& path);
void write_linear_image(const std::string& path, const LinearImage& img);

}  // namespace relight
