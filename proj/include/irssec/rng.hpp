#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <limits>

namespace irssec {

// Philox4x32-10 counter-based generator. A (seed, stream) pair names an
// independent substream; the block counter advances within it.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()();

  double uniform();                       // [0, 1)
  double uniform(double lo, double hi);   // [lo, hi)
  double normal();                        // N(0, 1)
  std::complex<double> cnormal();         // CN(0, 1)

  Rng substream(std::uint64_t id) const;
  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

 private:
  void refill();

  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t block_ = 0;
  std::array<std::uint32_t, 4> out_{};
  int used_ = 4;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

// Mixes a master seed with a run index into a fresh 64-bit seed.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

}  // namespace irssec
