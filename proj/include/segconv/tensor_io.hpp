#pragma once

#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "segconv/errors.hpp"
#include "segconv/tensor.hpp"

// SGC1 container: "SGC1" magic, then four little-endian u32 fields
// (height, width, channels, precision 0=f32/1=f64), then the raw element
// data little-endian in tensor storage order.

namespace segconv {

namespace detail {

inline std::uint32_t read_u32_le(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

inline void write_u32_le(std::ostream& os, std::uint32_t v) {
  const unsigned char b[4] = {static_cast<unsigned char>(v & 0xff),
                              static_cast<unsigned char>((v >> 8) & 0xff),
                              static_cast<unsigned char>((v >> 16) & 0xff),
                              static_cast<unsigned char>((v >> 24) & 0xff)};
  os.write(reinterpret_cast<const char*>(b), 4);
}

inline std::vector<unsigned char> slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  in.seekg(0, std::ios::end);
  const auto len = in.tellg();
  in.seekg(0, std::ios::beg);
  std::vector<unsigned char> buf(static_cast<std::size_t>(len));
  if (len > 0) in.read(reinterpret_cast<char*>(buf.data()), len);
  if (!in) throw IoError("read failure on " + path);
  return buf;
}

}  // namespace detail

struct TensorFileInfo {
  int height = 0, width = 0, channels = 0;
  Precision precision = Precision::f32;
};

// Parses just the 20-byte header.
inline TensorFileInfo peek_tensor_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  unsigned char hdr[20];
  in.read(reinterpret_cast<char*>(hdr), sizeof hdr);
  if (in.gcount() != sizeof hdr)
    throw ParseError(path + ": truncated header, expected 20 bytes, got " +
                         std::to_string(in.gcount()),
                     static_cast<std::size_t>(in.gcount()));
  if (std::memcmp(hdr, "SGC1", 4) != 0) throw ParseError(path + ": bad magic", 0);
  TensorFileInfo info;
  info.height = static_cast<int>(detail::read_u32_le(hdr + 4));
  info.width = static_cast<int>(detail::read_u32_le(hdr + 8));
  info.channels = static_cast<int>(detail::read_u32_le(hdr + 12));
  const std::uint32_t prec = detail::read_u32_le(hdr + 16);
  if (prec > 1) throw ParseError(path + ": unknown precision tag " + std::to_string(prec), 16);
  info.precision = static_cast<Precision>(prec);
  if (info.height < 1 || info.width < 1 || info.channels < 1)
    throw ParseError(path + ": non-positive dimension in header", 4);
  return info;
}

template <typename T>
Tensor<T> load_tensor(const std::string& path) {
  const TensorFileInfo info = peek_tensor_file(path);
  if (info.precision != precision_of<T>)
    throw ContractError(path + ": stored precision does not match requested element type");
  const std::vector<unsigned char> buf = detail::slurp(path);
  const std::size_t count = static_cast<std::size_t>(info.height) * info.width * info.channels;
  const std::size_t expect = 20 + count * sizeof(T);
  if (buf.size() != expect)
    throw ParseError(path + ": payload size mismatch, expected " + std::to_string(expect) +
                         " bytes total, got " + std::to_string(buf.size()),
                     buf.size() < expect ? buf.size() : expect);
  std::vector<T> values(count);
  std::memcpy(values.data(), buf.data() + 20, count * sizeof(T));  // LE host assumed
  return Tensor<T>::from_data(info.height, info.width, info.channels, std::move(values));
}

template <typename T>
void save_tensor(const Tensor<T>& t, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out.write("SGC1", 4);
  detail::write_u32_le(out, static_cast<std::uint32_t>(t.height()));
  detail::write_u32_le(out, static_cast<std::uint32_t>(t.width()));
  detail::write_u32_le(out, static_cast<std::uint32_t>(t.channels()));
  detail::write_u32_le(out, static_cast<std::uint32_t>(precision_of<T>));
  out.write(reinterpret_cast<const char*>(t.data()), static_cast<std::streamsize>(t.size() * sizeof(T)));
  if (!out) throw IoError("write failure on " + path);
}

}  // namespace segconv
