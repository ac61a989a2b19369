#include "gdps/image_io.hpp"

#include "gdps/errors.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>

namespace gdps {

namespace {

constexpr std::array<char, 8> kMagic = {'G', 'D', 'P', 'S', 'F', '6', '4', '\0'};

void put_u32(std::ostream &out, std::uint32_t v) {
  unsigned char b[4];
  for (int i = 0; i < 4; ++i)
    b[i] = static_cast<unsigned char>(v >> (8 * i));
  out.write(reinterpret_cast<const char *>(b), 4);
}

std::uint32_t get_u32(std::istream &in) {
  unsigned char b[4];
  in.read(reinterpret_cast<char *>(b), 4);
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i)
    v |= std::uint32_t(b[i]) << (8 * i);
  return v;
}

void put_f64(std::ostream &out, double x) {
  std::uint64_t bits = std::bit_cast<std::uint64_t>(x);
  unsigned char b[8];
  for (int i = 0; i < 8; ++i)
    b[i] = static_cast<unsigned char>(bits >> (8 * i));
  out.write(reinterpret_cast<const char *>(b), 8);
}

double get_f64(std::istream &in) {
  unsigned char b[8];
  in.read(reinterpret_cast<char *>(b), 8);
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i)
    bits |= std::uint64_t(b[i]) << (8 * i);
  return std::bit_cast<double>(bits);
}

std::ofstream open_out(const std::filesystem::path &path) {
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw IoError("cannot write " + path.string());
  return out;
}

std::ifstream open_in(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw IoError("cannot read " + path.string());
  return in;
}

// Next whitespace-delimited header token, skipping '#' comments.
std::string pnm_token(std::istream &in) {
  std::string tok;
  int ch;
  while ((ch = in.get()) != EOF) {
    if (ch == '#') {
      while ((ch = in.get()) != EOF && ch != '\n')
        ;
      continue;
    }
    if (std::isspace(ch)) {
      if (!tok.empty())
        break;
      continue;
    }
    tok.push_back(char(ch));
  }
  return tok;
}

int pnm_int(std::istream &in, const std::filesystem::path &path) {
  const std::string tok = pnm_token(in);
  try {
    std::size_t used = 0;
    const int v = std::stoi(tok, &used);
    if (used == tok.size() && v >= 0)
      return v;
  } catch (const std::exception &) {
  }
  throw IoError("malformed graymap " + path.string());
}

} // namespace

void write_f64(const std::filesystem::path &path, const ImageField &image) {
  std::ofstream out = open_out(path);
  out.write(kMagic.data(), kMagic.size());
  put_u32(out, std::uint32_t(image.height()));
  put_u32(out, std::uint32_t(image.width()));
  for (double x : image.data())
    put_f64(out, x);
  if (!out)
    throw IoError("write failed: " + path.string());
}

ImageField read_f64(const std::filesystem::path &path) {
  std::ifstream in = open_in(path);
  std::array<char, 8> magic{};
  in.read(magic.data(), magic.size());
  if (!in || magic != kMagic)
    throw IoError("not a gdps f64 image: " + path.string());
  const std::uint32_t h = get_u32(in), w = get_u32(in);
  if (!in || h == 0 || w == 0 || h > (1u << 16) || w > (1u << 16))
    throw IoError("bad f64 header: " + path.string());
  Vector data(Eigen::Index(h) * w);
  for (auto &x : data)
    x = get_f64(in);
  if (!in)
    throw IoError("truncated f64 image: " + path.string());
  in.peek();
  if (!in.eof())
    throw IoError("trailing bytes in f64 image: " + path.string());
  return ImageField(int(h), int(w), std::move(data));
}

void write_pgm(const std::filesystem::path &path, const ImageField &image) {
  std::ofstream out = open_out(path);
  const Vector &d = image.data();
  const double lo = d.size() ? d.minCoeff() : 0.0;
  const double hi = d.size() ? d.maxCoeff() : 0.0;
  const double span = hi > lo ? hi - lo : 1.0;
  out << "P2\n" << image.width() << ' ' << image.height() << "\n255\n";
  for (int r = 0; r < image.height(); ++r) {
    for (int c = 0; c < image.width(); ++c) {
      const long level = std::lround(255.0 * (image(r, c) - lo) / span);
      out << (c ? " " : "") << std::clamp(level, 0L, 255L);
    }
    out << '\n';
  }
  if (!out)
    throw IoError("write failed: " + path.string());
}

ImageField read_pgm(const std::filesystem::path &path) {
  std::ifstream in = open_in(path);
  const std::string kind = pnm_token(in);
  if (kind != "P2" && kind != "P5")
    throw IoError("unsupported graymap type in " + path.string());
  const int w = pnm_int(in, path), h = pnm_int(in, path),
            maxval = pnm_int(in, path);
  if (w == 0 || h == 0 || maxval == 0 || maxval > 65535)
    throw IoError("bad graymap header: " + path.string());
  ImageField image(h, w);
  for (auto &x : image.data()) {
    int level;
    if (kind == "P2") {
      level = pnm_int(in, path);
    } else if (maxval < 256) {
      level = in.get();
    } else {
      const int hi = in.get();
      level = (hi << 8) | in.get();
    }
    if (!in || level > maxval)
      throw IoError("bad graymap data: " + path.string());
    x = double(level) / maxval;
  }
  return image;
}

ImageField read_image(const std::filesystem::path &path) {
  const std::string ext = path.extension().string();
  if (ext == ".f64")
    return read_f64(path);
  if (ext == ".pgm")
    return read_pgm(path);
  throw IoError("unknown image extension '" + ext + "': " + path.string());
}

} // namespace gdps
