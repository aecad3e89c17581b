#pragma once

#include "irisvigil/types.hpp"

#include <iosfwd>
#include <string>

namespace irisvigil::io {

/// 8-bit grayscale PGM (P5) or PNG, scaled to [0, 1]. The format is picked
/// from the file signature. Throws IoError or ParseError.
GrayImage read_image(const std::string& path);

GrayImage read_pgm(std::istream& in);
GrayImage read_png(const std::string& path);

/// round(255 * v) after clamping to [0, 1].
Image<std::uint8_t> quantize(const GrayImage& img);

void write_pgm(std::ostream& out, const Image<std::uint8_t>& pixels);
void write_pgm(const std::string& path, const GrayImage& img);
/// Nonzero -> 255.
void write_mask_pgm(const std::string& path, const Mask& mask);

}  // namespace irisvigil::io
