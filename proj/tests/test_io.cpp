#include <catch2/catch_amalgamated.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "segconv/image/pnm.hpp"
#include "segconv/netdemo/dataset.hpp"
#include "segconv/tensor_io.hpp"

using segconv::ContractError;
using segconv::IoError;
using segconv::ParseError;
using segconv::Tensor;

namespace {

std::string tmp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("segconv_io_" + name)).string();
}

void write_bytes(const std::string& path, const std::vector<unsigned char>& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
}

void push_u32_be(std::vector<unsigned char>& v, std::uint32_t x) {
  v.push_back(static_cast<unsigned char>(x >> 24));
  v.push_back(static_cast<unsigned char>((x >> 16) & 0xff));
  v.push_back(static_cast<unsigned char>((x >> 8) & 0xff));
  v.push_back(static_cast<unsigned char>(x & 0xff));
}

}  // namespace

TEST_CASE("tensor container round-trips both precisions") {
  const std::string path = tmp_path("roundtrip.sgc");

  Tensor<float> tf(5, 4, 3);
  for (std::size_t i = 0; i < tf.size(); ++i) tf.data()[i] = 0.25f * static_cast<float>(i) - 7.5f;
  segconv::save_tensor(tf, path);

  const auto info = segconv::peek_tensor_file(path);
  REQUIRE(info.height == 5);
  REQUIRE(info.width == 4);
  REQUIRE(info.channels == 3);
  REQUIRE(info.precision == segconv::Precision::f32);
  REQUIRE(segconv::tensors_equal_exact(segconv::load_tensor<float>(path), tf));

  Tensor<double> td(2, 2, 1);
  td(0, 0, 0) = 1.0 / 3.0;
  td(1, 1, 0) = -1e300;
  segconv::save_tensor(td, path);
  REQUIRE(segconv::peek_tensor_file(path).precision == segconv::Precision::f64);
  REQUIRE(segconv::tensors_equal_exact(segconv::load_tensor<double>(path), td));
}

TEST_CASE("tensor container rejects malformed files") {
  const std::string path = tmp_path("bad.sgc");

  SECTION("missing file") {
    REQUIRE_THROWS_AS(segconv::load_tensor<float>(tmp_path("does_not_exist.sgc")), IoError);
  }

  SECTION("precision mismatch is a caller error") {
    segconv::save_tensor(Tensor<float>(1, 1, 1), path);
    REQUIRE_THROWS_AS(segconv::load_tensor<double>(path), ContractError);
  }

  SECTION("bad magic reported at offset 0") {
    write_text(path, "NOPE................");
    try {
      segconv::peek_tensor_file(path);
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      REQUIRE(e.byte_offset == 0);
    }
  }

  SECTION("short header reported at its length") {
    write_text(path, "SGC1xxxx");
    try {
      segconv::peek_tensor_file(path);
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      REQUIRE(e.byte_offset == 8);
    }
  }

  SECTION("unknown precision tag reported at its field") {
    std::vector<unsigned char> hdr{'S', 'G', 'C', '1'};
    for (std::uint32_t field : {1u, 1u, 1u, 7u}) {
      hdr.push_back(static_cast<unsigned char>(field & 0xff));
      hdr.push_back(static_cast<unsigned char>((field >> 8) & 0xff));
      hdr.push_back(static_cast<unsigned char>((field >> 16) & 0xff));
      hdr.push_back(static_cast<unsigned char>((field >> 24) & 0xff));
    }
    write_bytes(path, hdr);
    try {
      segconv::peek_tensor_file(path);
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      REQUIRE(e.byte_offset == 16);
      REQUIRE(std::string(e.what()).find("precision tag 7") != std::string::npos);
    }
  }

  SECTION("payload shorter than the header promises") {
    segconv::save_tensor(Tensor<float>(2, 2, 1), path);  // 36 bytes
    std::filesystem::resize_file(path, 28);
    try {
      segconv::load_tensor<float>(path);
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      REQUIRE(e.byte_offset == 28);
      REQUIRE(std::string(e.what()).find("expected 36") != std::string::npos);
    }
  }
}

TEST_CASE("ascii netpbm with comments and odd whitespace") {
  const std::string path = tmp_path("ascii.pgm");
  write_text(path, "P2 # greyscale\n# another comment\n 3 2\n255\n0 128 255\n#mid\n10 20 30\n");
  const auto t = segconv::image::load_pnm<float>(path);
  REQUIRE(t.height() == 2);
  REQUIRE(t.width() == 3);
  REQUIRE(t.channels() == 1);
  const float scale = 1.0f / 255.0f;
  REQUIRE(t(0, 0, 0) == 0.0f);
  REQUIRE(t(0, 1, 0) == 128.0f * scale);
  REQUIRE(t(0, 2, 0) == 1.0f);
  REQUIRE(t(1, 2, 0) == 30.0f * scale);

  const std::string ppm = tmp_path("ascii.ppm");
  write_text(ppm, "P3\n1 1\n100\n100 0 50\n");
  const auto c = segconv::image::load_pnm<double>(ppm);
  REQUIRE(c.channels() == 3);
  REQUIRE(c(0, 0, 0) == 1.0);
  REQUIRE(c(0, 0, 2) == 50.0 * (1.0 / 100.0));
}

TEST_CASE("binary netpbm round-trip at 8 bits") {
  const std::string path = tmp_path("roundtrip.ppm");
  Tensor<float> t(3, 2, 3);
  const float scale = 1.0f / 255.0f;
  for (std::size_t i = 0; i < t.size(); ++i)
    t.data()[i] = static_cast<float>((i * 13) % 256) * scale;
  segconv::image::save_pnm8(t, path);
  REQUIRE(segconv::tensors_equal_exact(segconv::image::load_pnm<float>(path), t));

  Tensor<float> grey(2, 2, 1);
  grey(0, 0, 0) = 1.5f;   // clamps to 255
  grey(1, 1, 0) = -0.5f;  // clamps to 0
  segconv::image::save_pnm8(grey, path);
  const auto back = segconv::image::load_pnm<float>(path);
  REQUIRE(back(0, 0, 0) == 1.0f);
  REQUIRE(back(1, 1, 0) == 0.0f);

  REQUIRE_THROWS_AS(segconv::image::save_pnm8(Tensor<float>(1, 1, 2), path), ContractError);
}

TEST_CASE("sixteen-bit netpbm samples are big-endian") {
  const std::string path = tmp_path("deep.ppm");
  std::vector<unsigned char> bytes;
  const std::string header = "P6\n2 1\n65535\n";
  bytes.assign(header.begin(), header.end());
  for (unsigned char b : {0x12, 0x34, 0x00, 0x00, 0xff, 0xff,   // pixel 0: rgb
                          0x00, 0x01, 0x80, 0x00, 0x00, 0xff})  // pixel 1: rgb
    bytes.push_back(b);
  write_bytes(path, bytes);
  const auto t = segconv::image::load_pnm<float>(path);
  REQUIRE(t.height() == 1);
  REQUIRE(t.width() == 2);
  const float scale = 1.0f / 65535.0f;
  REQUIRE(t(0, 0, 0) == 0x1234 * scale);
  REQUIRE(t(0, 0, 1) == 0.0f);
  REQUIRE(t(0, 0, 2) == 1.0f);
  REQUIRE(t(0, 1, 0) == 1.0f * scale);
  REQUIRE(t(0, 1, 1) == 0x8000 * scale);
}

TEST_CASE("netpbm parse failures carry byte offsets") {
  const std::string path = tmp_path("bad.pnm");

  SECTION("unsupported magic") {
    write_text(path, "P7\n1 1\n255\n");
    try {
      segconv::image::load_pnm<float>(path);
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      REQUIRE(e.byte_offset == 1);
    }
  }

  SECTION("truncated binary payload names both byte counts") {
    std::vector<unsigned char> bytes;
    const std::string header = "P6\n2 2\n255\n";
    bytes.assign(header.begin(), header.end());
    for (int i = 0; i < 5; ++i) bytes.push_back(0);  // needs 12
    write_bytes(path, bytes);
    try {
      segconv::image::load_pnm<float>(path);
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      const std::string what = e.what();
      REQUIRE(what.find("expected 12 bytes") != std::string::npos);
      REQUIRE(what.find("got 5") != std::string::npos);
      REQUIRE(e.byte_offset == bytes.size());
    }
  }

  SECTION("ascii sample above maxval") {
    write_text(path, "P2\n2 1\n100\n50 101\n");
    REQUIRE_THROWS_WITH(segconv::image::load_pnm<float>(path),
                        Catch::Matchers::ContainsSubstring("exceeds maxval 100"));
  }

  SECTION("binary sample above maxval points at the sample") {
    const std::string header = "P5\n2 1\n100\n";
    std::vector<unsigned char> bytes(header.begin(), header.end());
    bytes.push_back(10);
    bytes.push_back(200);
    write_bytes(path, bytes);
    try {
      segconv::image::load_pnm<float>(path);
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      REQUIRE(e.byte_offset == header.size() + 1);
    }
  }

  SECTION("header cut off mid-field") {
    write_text(path, "P2\n4");
    REQUIRE_THROWS_AS(segconv::image::load_pnm<float>(path), ParseError);
  }

  SECTION("zero maxval") {
    write_text(path, "P2\n1 1\n0\n0\n");
    REQUIRE_THROWS_AS(segconv::image::load_pnm<float>(path), ParseError);
  }
}

TEST_CASE("idx dataset loader") {
  const std::string ipath = tmp_path("imgs.idx");
  const std::string lpath = tmp_path("labels.idx");

  std::vector<unsigned char> ibuf;
  push_u32_be(ibuf, 0x00000803u);
  push_u32_be(ibuf, 3);  // images
  push_u32_be(ibuf, 2);  // rows
  push_u32_be(ibuf, 2);  // cols
  for (int i = 0; i < 12; ++i) ibuf.push_back(static_cast<unsigned char>(20 * i));
  std::vector<unsigned char> lbuf;
  push_u32_be(lbuf, 0x00000801u);
  push_u32_be(lbuf, 3);
  for (unsigned char l : {1, 0, 2}) lbuf.push_back(l);
  write_bytes(ipath, ibuf);
  write_bytes(lpath, lbuf);

  SECTION("values scale to [0,1] and labels line up") {
    const auto set = segconv::net::load_idx_dataset<float>(ipath, lpath);
    REQUIRE(set.size() == 3);
    REQUIRE(set[0].label == 1);
    REQUIRE(set[2].label == 2);
    REQUIRE(set[0].image.height() == 2);
    REQUIRE(set[1].image(0, 0, 0) == static_cast<float>(80) / 255.0f);
    REQUIRE(set[2].image(1, 1, 0) == static_cast<float>(220) / 255.0f);
  }

  SECTION("limit truncates") {
    REQUIRE(segconv::net::load_idx_dataset<float>(ipath, lpath, 2).size() == 2);
  }

  SECTION("bad image magic") {
    auto bad = ibuf;
    bad[3] = 0x01;
    write_bytes(ipath, bad);
    REQUIRE_THROWS_AS(segconv::net::load_idx_dataset<float>(ipath, lpath), ParseError);
  }

  SECTION("count mismatch between files") {
    auto bad = lbuf;
    bad[7] = 2;
    write_bytes(lpath, bad);
    REQUIRE_THROWS_WITH(segconv::net::load_idx_dataset<float>(ipath, lpath),
                        Catch::Matchers::ContainsSubstring("does not match label count"));
  }

  SECTION("truncated image payload") {
    auto bad = ibuf;
    bad.resize(bad.size() - 4);
    write_bytes(ipath, bad);
    REQUIRE_THROWS_WITH(segconv::net::load_idx_dataset<float>(ipath, lpath),
                        Catch::Matchers::ContainsSubstring("truncated payload"));
  }
}

TEST_CASE("synthetic digits are deterministic and well-formed") {
  const auto a = segconv::net::make_synth_digits<float>(3, 4, 99);
  const auto b = segconv::net::make_synth_digits<float>(3, 4, 99);
  REQUIRE(a.size() == 12);
  for (std::size_t i = 0; i < a.size(); ++i) {
    REQUIRE(a[i].label == static_cast<int>(i) / 3);
    REQUIRE(a[i].image.height() == 28);
    REQUIRE(a[i].image.width() == 28);
    REQUIRE(a[i].image.channels() == 1);
    REQUIRE(segconv::tensors_equal_exact(a[i].image, b[i].image));
    for (std::size_t e = 0; e < a[i].image.size(); ++e) {
      REQUIRE(a[i].image.data()[e] >= 0.0f);
      REQUIRE(a[i].image.data()[e] <= 1.0f);
    }
  }
  // Different seeds give different noise.
  const auto c = segconv::net::make_synth_digits<float>(1, 2, 100);
  const auto d = segconv::net::make_synth_digits<float>(1, 2, 101);
  REQUIRE_FALSE(segconv::tensors_equal_exact(c[0].image, d[0].image));

  REQUIRE_THROWS_AS(segconv::net::make_synth_digits<float>(0, 4, 1), ContractError);
  REQUIRE_THROWS_AS(segconv::net::make_synth_digits<float>(1, 1, 1), ContractError);
  REQUIRE_THROWS_AS(segconv::net::make_synth_digits<float>(1, 11, 1), ContractError);
}
