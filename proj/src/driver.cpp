#include "mtasc/driver.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace mtasc {

RunCounts& RunCounts::operator+=(const RunCounts& o) {
  n_traj += o.n_traj;
  n_valid += o.n_valid;
  n_non_finite += o.n_non_finite;
  n_phase_unresolved += o.n_phase_unresolved;
  n_not_positive_definite += o.n_not_positive_definite;
  return *this;
}

namespace {

constexpr char kMagic[8] = {'M', 'T', 'A', 'S', 'C', 'S', 'P', '1'};
constexpr std::size_t kHeaderValues = 11;

static_assert(std::endian::native == std::endian::little, "scratch format assumes a little-endian host");

}  // namespace

void write_scratch(const std::string& path, const ScratchState& state) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot write scratch file '" + tmp + "'");
    const double header[kHeaderValues] = {static_cast<double>(state.sum.size()),
                                          static_cast<double>(state.blocks_done),
                                          static_cast<double>(state.block_size),
                                          static_cast<double>(state.n_traj),
                                          static_cast<double>(state.seed & 0xffffffffULL),
                                          static_cast<double>(state.seed >> 32),
                                          static_cast<double>(state.counts.n_traj),
                                          static_cast<double>(state.counts.n_valid),
                                          static_cast<double>(state.counts.n_non_finite),
                                          static_cast<double>(state.counts.n_phase_unresolved),
                                          static_cast<double>(state.counts.n_not_positive_definite)};
    os.write(kMagic, sizeof(kMagic));
    os.write(reinterpret_cast<const char*>(header), sizeof(header));
    os.write(reinterpret_cast<const char*>(state.sum.data()),
             static_cast<std::streamsize>(sizeof(double) * static_cast<std::size_t>(state.sum.size())));
    if (!os) throw std::runtime_error("cannot write scratch file '" + tmp + "'");
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    throw std::runtime_error("cannot move scratch file into '" + path + "'");
  }
}

bool read_scratch(const std::string& path, ScratchState& state) {
  std::ifstream is(path, std::ios::binary);
  if (!is) return false;
  char magic[8];
  double header[kHeaderValues];
  is.read(magic, sizeof(magic));
  is.read(reinterpret_cast<char*>(header), sizeof(header));
  if (!is || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw std::invalid_argument("scratch file '" + path + "' is malformed");
  }
  auto count = [](double v) { return static_cast<std::size_t>(v); };
  state.blocks_done = count(header[1]);
  state.block_size = count(header[2]);
  state.n_traj = count(header[3]);
  state.seed = static_cast<std::uint64_t>(header[4]) | (static_cast<std::uint64_t>(header[5]) << 32);
  state.counts.n_traj = count(header[6]);
  state.counts.n_valid = count(header[7]);
  state.counts.n_non_finite = count(header[8]);
  state.counts.n_phase_unresolved = count(header[9]);
  state.counts.n_not_positive_definite = count(header[10]);
  state.sum.resize(static_cast<Eigen::Index>(count(header[0])));
  is.read(reinterpret_cast<char*>(state.sum.data()),
          static_cast<std::streamsize>(sizeof(double) * static_cast<std::size_t>(state.sum.size())));
  if (!is) throw std::invalid_argument("scratch file '" + path + "' is truncated");
  return true;
}

}  // namespace mtasc
