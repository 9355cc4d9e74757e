#pragma once

#include <array>
#include <cstdint>

namespace sftdim {

// Philox4x32-10 counter-based generator (Salmon, Moraes, Dror, Shaw 2011).
// Every random quantity in the project is a pure function of
// (seed, stream, draw index), which makes sampling reproducible across
// platforms, thread counts, and the scalar/SIMD kernel variants.
//
// Layout: key = 64-bit seed, counter = (block index, stream id), one block
// yields four consecutive 32-bit draws. Stream ids are assigned as
// 2*sample for forward path draws and 2*sample+1 for backward draws.
struct Philox4x32 {
  static constexpr uint32_t kMul0 = 0xD2511F53u;
  static constexpr uint32_t kMul1 = 0xCD9E8D57u;
  static constexpr uint32_t kWeyl0 = 0x9E3779B9u;
  static constexpr uint32_t kWeyl1 = 0xBB67AE85u;

  static std::array<uint32_t, 4> block(uint64_t key, uint64_t block_index, uint64_t stream) {
    uint32_t c0 = static_cast<uint32_t>(block_index);
    uint32_t c1 = static_cast<uint32_t>(block_index >> 32);
    uint32_t c2 = static_cast<uint32_t>(stream);
    uint32_t c3 = static_cast<uint32_t>(stream >> 32);
    uint32_t k0 = static_cast<uint32_t>(key);
    uint32_t k1 = static_cast<uint32_t>(key >> 32);
    for (int round = 0; round < 10; ++round) {
      uint64_t p0 = static_cast<uint64_t>(kMul0) * c0;
      uint64_t p1 = static_cast<uint64_t>(kMul1) * c2;
      uint32_t hi0 = static_cast<uint32_t>(p0 >> 32);
      uint32_t lo0 = static_cast<uint32_t>(p0);
      uint32_t hi1 = static_cast<uint32_t>(p1 >> 32);
      uint32_t lo1 = static_cast<uint32_t>(p1);
      uint32_t n0 = hi1 ^ c1 ^ k0;
      uint32_t n1 = lo1;
      uint32_t n2 = hi0 ^ c3 ^ k1;
      uint32_t n3 = lo0;
      c0 = n0; c1 = n1; c2 = n2; c3 = n3;
      k0 += kWeyl0;
      k1 += kWeyl1;
    }
    return {c0, c1, c2, c3};
  }
};

// Maps a 32-bit word to (0,1). The arithmetic is exact in double precision
// (all intermediates fit in 33 significand bits), so scalar and SIMD code
// produce identical values.
inline double uniform_from_u32(uint32_t x) {
  return static_cast<double>(static_cast<int32_t>(x)) * 0x1p-32 + (0.5 + 0x1p-33);
}

// Sequential view of one stream; draw j comes from block j/4, word j%4.
class UniformStream {
 public:
  UniformStream(uint64_t seed, uint64_t stream) : key_(seed), stream_(stream) {}

  double next() {
    if (pos_ == 4) {
      buf_ = Philox4x32::block(key_, next_block_++, stream_);
      pos_ = 0;
    }
    return uniform_from_u32(buf_[pos_++]);
  }

 private:
  uint64_t key_;
  uint64_t stream_;
  uint64_t next_block_ = 0;
  std::array<uint32_t, 4> buf_{};
  int pos_ = 4;
};

}  // namespace sftdim
