#pragma once

#include <cctype>
#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include "segconv/errors.hpp"
#include "segconv/tensor.hpp"
#include "segconv/tensor_io.hpp"

// Netpbm readers/writers: PGM (P2 ascii / P5 binary, one channel) and
// PPM (P3 / P6, three channels). Loaded samples are scaled to [0, 1];
// maxval up to 65535 is accepted, with two-byte big-endian samples in the
// binary formats above 255, per the format's rules.

namespace segconv::image {

namespace detail {

class HeaderScanner {
 public:
  HeaderScanner(const std::vector<unsigned char>& buf, const std::string& path, std::size_t start)
      : buf_(buf), path_(path), pos_(start) {}

  std::size_t pos() const { return pos_; }

  void skip_separators() {
    while (pos_ < buf_.size()) {
      const unsigned char ch = buf_[pos_];
      if (ch == '#') {
        while (pos_ < buf_.size() && buf_[pos_] != '\n') ++pos_;
      } else if (std::isspace(ch)) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  long next_int(const char* what, long cap) {
    skip_separators();
    if (pos_ >= buf_.size())
      throw ParseError(path_ + ": unexpected end of file while reading " + std::string(what), pos_);
    if (!std::isdigit(buf_[pos_]))
      throw ParseError(path_ + ": expected a digit for " + std::string(what), pos_);
    long value = 0;
    while (pos_ < buf_.size() && std::isdigit(buf_[pos_])) {
      value = value * 10 + (buf_[pos_] - '0');
      if (value > cap)
        throw ParseError(path_ + ": " + std::string(what) + " exceeds limit " + std::to_string(cap),
                         pos_);
      ++pos_;
    }
    return value;
  }

  // Binary payloads start after exactly one separator byte.
  void expect_single_separator() {
    if (pos_ >= buf_.size() || !std::isspace(buf_[pos_]))
      throw ParseError(path_ + ": expected whitespace before the binary payload", pos_);
    ++pos_;
  }

 private:
  const std::vector<unsigned char>& buf_;
  const std::string& path_;
  std::size_t pos_;
};

}  // namespace detail

template <typename T>
Tensor<T> load_pnm(const std::string& path) {
  const std::vector<unsigned char> buf = segconv::detail::slurp(path);
  if (buf.size() < 2 || buf[0] != 'P')
    throw ParseError(path + ": not a PGM/PPM file (no P header)", 0);
  const char magic = static_cast<char>(buf[1]);
  if (magic != '2' && magic != '3' && magic != '5' && magic != '6')
    throw ParseError(path + ": unsupported magic P" + std::string(1, magic) +
                         " (P2/P3/P5/P6 handled)",
                     1);
  const bool ascii = magic == '2' || magic == '3';
  const int channels = (magic == '3' || magic == '6') ? 3 : 1;

  detail::HeaderScanner scan(buf, path, 2);
  const int width = static_cast<int>(scan.next_int("width", 1 << 20));
  const int height = static_cast<int>(scan.next_int("height", 1 << 20));
  const long maxval = scan.next_int("maxval", 65535);
  if (width < 1 || height < 1) throw ParseError(path + ": zero image dimension", scan.pos());
  if (maxval < 1) throw ParseError(path + ": maxval must be at least 1", scan.pos());

  const std::size_t samples =
      static_cast<std::size_t>(width) * static_cast<std::size_t>(height) * channels;
  std::vector<T> values(samples);
  const T scale = T(1) / static_cast<T>(maxval);

  if (ascii) {
    for (std::size_t i = 0; i < samples; ++i) {
      const long v = scan.next_int("sample value", 1 << 20);
      if (v > maxval)
        throw ParseError(path + ": sample " + std::to_string(v) + " exceeds maxval " +
                             std::to_string(maxval),
                         scan.pos());
      values[i] = static_cast<T>(v) * scale;
    }
  } else {
    scan.expect_single_separator();
    const std::size_t payload_start = scan.pos();
    const int sample_bytes = maxval > 255 ? 2 : 1;
    const std::size_t need = samples * sample_bytes;
    const std::size_t have = buf.size() - payload_start;
    if (have < need)
      throw ParseError(path + ": truncated payload, expected " + std::to_string(need) +
                           " bytes, got " + std::to_string(have),
                       buf.size());
    const unsigned char* p = buf.data() + payload_start;
    for (std::size_t i = 0; i < samples; ++i) {
      long v;
      if (sample_bytes == 2) {
        v = (static_cast<long>(p[2 * i]) << 8) | p[2 * i + 1];  // big-endian
      } else {
        v = p[i];
      }
      if (v > maxval)
        throw ParseError(path + ": sample " + std::to_string(v) + " exceeds maxval " +
                             std::to_string(maxval),
                         payload_start + i * sample_bytes);
      values[i] = static_cast<T>(v) * scale;
    }
  }
  return Tensor<T>::from_data(height, width, channels, std::move(values));
}

// Writes a binary PGM/PPM at maxval 255, clamping values to [0, 1] first.
template <typename T>
void save_pnm8(const Tensor<T>& t, const std::string& path) {
  if (t.channels() != 1 && t.channels() != 3)
    throw ContractError("PGM/PPM output needs 1 or 3 channels, tensor has " +
                        std::to_string(t.channels()));
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << (t.channels() == 1 ? "P5" : "P6") << "\n"
      << t.width() << " " << t.height() << "\n255\n";
  std::vector<unsigned char> row(static_cast<std::size_t>(t.width()) * t.channels());
  for (int i = 0; i < t.height(); ++i) {
    const T* src = t.pixel(i, 0);
    for (std::size_t s = 0; s < row.size(); ++s) {
      T v = src[s];
      if (v < T(0)) v = T(0);
      if (v > T(1)) v = T(1);
      row[s] = static_cast<unsigned char>(v * T(255) + T(0.5));
    }
    out.write(reinterpret_cast<const char*>(row.data()), static_cast<std::streamsize>(row.size()));
  }
  if (!out) throw IoError("write failure on " + path);
}

}  // namespace segconv::image
