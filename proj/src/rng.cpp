#include "gmratio/rng.hpp"

namespace gmratio {

namespace {

std::mt19937_64 seeded_engine(std::uint64_t seed, std::uint64_t stream_index) {
  std::seed_seq sequence{
      static_cast<std::uint32_t>(seed),         static_cast<std::uint32_t>(seed >> 32),
      static_cast<std::uint32_t>(stream_index), static_cast<std::uint32_t>(stream_index >> 32),
      0x67d0a7e1u,
  };
  return std::mt19937_64(sequence);
}

}  // namespace

SeededStream::SeededStream(std::uint64_t seed, std::uint64_t stream_index)
    : seed_(seed), stream_index_(stream_index), engine_(seeded_engine(seed, stream_index)) {}

double SeededStream::sign() {
  if (sign_bits_left_ == 0) {
    sign_bits_ = engine_();
    sign_bits_left_ = 64;
  }
  const bool negative = (sign_bits_ & 1u) != 0;
  sign_bits_ >>= 1;
  --sign_bits_left_;
  return negative ? -1.0 : 1.0;
}

}  // namespace gmratio
