#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace pcore {

// Flat little-endian sequence of 16-bit instruction words, lowest address first.
using CodeImage = std::vector<uint16_t>;

// Static data words placed at consecutive data-cache addresses from `base`.
struct DataImage {
  uint16_t base = 0x020;
  std::vector<uint32_t> words;
};

void write_code_image(const std::string& path, const CodeImage& image);
CodeImage read_code_image(const std::string& path);

// .dat layout: u32 word count, u32 base address, then the words, all little-endian.
void write_data_image(const std::string& path, const DataImage& image);
DataImage read_data_image(const std::string& path);

}  // namespace pcore
