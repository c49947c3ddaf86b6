#include "pcore/image.hpp"

#include <fstream>
#include <stdexcept>

namespace pcore {

namespace {

void put_u16(std::ostream& os, uint16_t v) {
  char b[2] = {static_cast<char>(v & 0xFF), static_cast<char>((v >> 8) & 0xFF)};
  os.write(b, 2);
}

void put_u32(std::ostream& os, uint32_t v) {
  char b[4] = {static_cast<char>(v & 0xFF), static_cast<char>((v >> 8) & 0xFF),
               static_cast<char>((v >> 16) & 0xFF), static_cast<char>((v >> 24) & 0xFF)};
  os.write(b, 4);
}

uint16_t get_u16(std::istream& is) {
  unsigned char b[2];
  is.read(reinterpret_cast<char*>(b), 2);
  if (!is) throw std::runtime_error("truncated image file");
  return static_cast<uint16_t>(b[0] | (b[1] << 8));
}

uint32_t get_u32(std::istream& is) {
  unsigned char b[4];
  is.read(reinterpret_cast<char*>(b), 4);
  if (!is) throw std::runtime_error("truncated image file");
  return static_cast<uint32_t>(b[0]) | (static_cast<uint32_t>(b[1]) << 8) |
         (static_cast<uint32_t>(b[2]) << 16) | (static_cast<uint32_t>(b[3]) << 24);
}

std::ofstream open_out(const std::string& path) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  return os;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open for reading: " + path);
  return is;
}

}  // namespace

void write_code_image(const std::string& path, const CodeImage& image) {
  auto os = open_out(path);
  for (uint16_t w : image) put_u16(os, w);
}

CodeImage read_code_image(const std::string& path) {
  auto is = open_in(path);
  is.seekg(0, std::ios::end);
  auto size = static_cast<size_t>(is.tellg());
  is.seekg(0);
  if (size % 2 != 0) throw std::runtime_error("code image has odd byte count: " + path);
  CodeImage image;
  image.reserve(size / 2);
  for (size_t i = 0; i < size / 2; ++i) image.push_back(get_u16(is));
  return image;
}

void write_data_image(const std::string& path, const DataImage& image) {
  auto os = open_out(path);
  put_u32(os, static_cast<uint32_t>(image.words.size()));
  put_u32(os, image.base);
  for (uint32_t w : image.words) put_u32(os, w);
}

DataImage read_data_image(const std::string& path) {
  auto is = open_in(path);
  uint32_t count = get_u32(is);
  DataImage image;
  image.base = static_cast<uint16_t>(get_u32(is));
  image.words.reserve(count);
  for (uint32_t i = 0; i < count; ++i) image.words.push_back(get_u32(is));
  return image;
}

}  // namespace pcore
