#include "tnst/tt_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace tnst {

namespace {

constexpr char kMagic[8] = {'T', 'N', 'S', 'T', 'T', 'T', '0', '1'};

template <class T>
T to_little(T v) {
  if constexpr (std::endian::native == std::endian::big) {
    unsigned char b[sizeof(T)];
    std::memcpy(b, &v, sizeof(T));
    for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(b[i], b[sizeof(T) - 1 - i]);
    std::memcpy(&v, b, sizeof(T));
  }
  return v;
}

void put_u64(std::ostream& out, std::uint64_t v) {
  v = to_little(v);
  out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

std::uint64_t get_u64(std::istream& in) {
  std::uint64_t v = 0;
  if (!in.read(reinterpret_cast<char*>(&v), sizeof(v))) throw std::runtime_error("read_tt: truncated header");
  return to_little(v);
}

}  // namespace

void write_tt(std::ostream& out, const TTTensor& t) {
  out.write(kMagic, sizeof(kMagic));
  for (const auto& c : t.cores()) {
    put_u64(out, static_cast<std::uint64_t>(c.r0));
    put_u64(out, static_cast<std::uint64_t>(c.n));
    put_u64(out, static_cast<std::uint64_t>(c.r1));
    for (Eigen::Index i = 0; i < c.data.size(); ++i) {
      const double v = to_little(c.data[i]);
      out.write(reinterpret_cast<const char*>(&v), sizeof(v));
    }
  }
  if (!out) throw std::runtime_error("write_tt: stream error");
}

TTTensor read_tt(std::istream& in) {
  char magic[sizeof(kMagic)];
  if (!in.read(magic, sizeof(magic)) || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw std::runtime_error("read_tt: not a TT core file");
  }
  std::array<TTCore, 4> cores;
  for (auto& c : cores) {
    const auto r0 = get_u64(in), n = get_u64(in), r1 = get_u64(in);
    constexpr std::uint64_t kLimit = std::uint64_t{1} << 32;
    if (r0 == 0 || n == 0 || r1 == 0 || r0 * n * r1 > kLimit) throw std::runtime_error("read_tt: bad core shape");
    c = TTCore(static_cast<Eigen::Index>(r0), static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(r1));
    for (Eigen::Index i = 0; i < c.data.size(); ++i) {
      double v = 0.0;
      if (!in.read(reinterpret_cast<char*>(&v), sizeof(v))) throw std::runtime_error("read_tt: truncated core data");
      c.data[i] = to_little(v);
    }
  }
  return TTTensor(std::move(cores));
}

void save_tt(const std::filesystem::path& path, const TTTensor& t) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("save_tt: cannot open " + path.string());
  write_tt(out, t);
}

TTTensor load_tt(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("load_tt: cannot open " + path.string());
  return read_tt(in);
}

}  // namespace tnst
