#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace hbarsim {

// Counter-based generator (Philox 4x32, 10 rounds). Every 128-bit output
// block is a pure function of (key, counter), so substreams are free: the
// master seed is the key, the stream index and block index form the counter.
// Values never depend on evaluation order or thread assignment.
class Philox4x32 {
 public:
  using Block = std::array<std::uint32_t, 4>;

  Philox4x32(std::uint64_t seed, std::uint64_t stream)
      : key0_(static_cast<std::uint32_t>(seed)),
        key1_(static_cast<std::uint32_t>(seed >> 32)),
        stream_lo_(static_cast<std::uint32_t>(stream)),
        stream_hi_(static_cast<std::uint32_t>(stream >> 32)) {}

  Block block(std::uint64_t index) const {
    Block ctr{static_cast<std::uint32_t>(index),
              static_cast<std::uint32_t>(index >> 32), stream_lo_, stream_hi_};
    std::uint32_t k0 = key0_;
    std::uint32_t k1 = key1_;
    for (int round = 0; round < 10; ++round) {
      if (round > 0) {
        k0 += 0x9E3779B9u;  // golden-ratio Weyl increments
        k1 += 0xBB67AE85u;
      }
      ctr = single_round(ctr, k0, k1);
    }
    return ctr;
  }

 private:
  static void mul_hi_lo(std::uint32_t a, std::uint32_t b, std::uint32_t& lo,
                        std::uint32_t& hi) {
    const std::uint64_t product = static_cast<std::uint64_t>(a) * b;
    lo = static_cast<std::uint32_t>(product);
    hi = static_cast<std::uint32_t>(product >> 32);
  }

  static Block single_round(const Block& ctr, std::uint32_t k0,
                            std::uint32_t k1) {
    std::uint32_t lo0, hi0, lo1, hi1;
    mul_hi_lo(0xD2511F53u, ctr[0], lo0, hi0);
    mul_hi_lo(0xCD9E8D57u, ctr[2], lo1, hi1);
    return Block{hi1 ^ ctr[1] ^ k0, lo1, hi0 ^ ctr[3] ^ k1, lo0};
  }

  std::uint32_t key0_;
  std::uint32_t key1_;
  std::uint32_t stream_lo_;
  std::uint32_t stream_hi_;
};

// Standard-normal stream for one (seed, stream) pair: one Philox block feeds
// one Box-Muller pair.
class NormalStream {
 public:
  NormalStream(std::uint64_t seed, std::uint64_t stream) : gen_(seed, stream) {}

  double next() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const auto b = gen_.block(block_index_++);
    const double u1 = to_unit_open_closed(join(b[0], b[1]));
    const double u2 = to_unit_closed_open(join(b[2], b[3]));
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * M_PI * u2;
    spare_ = radius * std::sin(angle);
    have_spare_ = true;
    return radius * std::cos(angle);
  }

 private:
  static std::uint64_t join(std::uint32_t lo, std::uint32_t hi) {
    return (static_cast<std::uint64_t>(hi) << 32) | lo;
  }
  // 53-bit mantissa; (0,1] keeps log() finite.
  static double to_unit_open_closed(std::uint64_t x) {
    return static_cast<double>((x >> 11) + 1) * 0x1.0p-53;
  }
  static double to_unit_closed_open(std::uint64_t x) {
    return static_cast<double>(x >> 11) * 0x1.0p-53;
  }

  Philox4x32 gen_;
  std::uint64_t block_index_ = 0;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

// Handle identifying one reproducible substream of the master generator.
struct RandomStream {
  std::uint64_t master_seed = 0;
  std::uint64_t stream_index = 0;

  NormalStream normals() const { return NormalStream(master_seed, stream_index); }
};

}  // namespace hbarsim
