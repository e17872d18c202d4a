#pragma once

#include "ethdr/tensor.hpp"

#include <string>

namespace ethdr {

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// PPM P6, 8-bit. Decoded values are divided by the file's maxval.
Tensor read_ppm(const std::string& path);
void write_ppm(const std::string& path, const Tensor& img);

// PFM "PF" (color), little-endian scale line "-1.0", rows bottom-to-top.
// Read/write round trips are bit-exact.
Tensor read_pfm(const std::string& path);
void write_pfm(const std::string& path, const Tensor& img);

// Sniffs the magic bytes (P6 or PF).
Tensor read_image(const std::string& path);

}  // namespace ethdr
