#include "irssec/rng.hpp"

#include <cmath>

namespace irssec {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

std::array<std::uint32_t, 4> philox(std::array<std::uint32_t, 4> c, std::array<std::uint32_t, 2> k) {
  for (int round = 0; round < 10; ++round) {
    std::uint64_t p0 = std::uint64_t(kMul0) * c[0];
    std::uint64_t p1 = std::uint64_t(kMul1) * c[2];
    c = {std::uint32_t(p1 >> 32) ^ c[1] ^ k[0], std::uint32_t(p1),
         std::uint32_t(p0 >> 32) ^ c[3] ^ k[1], std::uint32_t(p0)};
    k[0] += kWeyl0;
    k[1] += kWeyl1;
  }
  return c;
}

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

}  // namespace

Rng::Rng(std::uint64_t seed, std::uint64_t stream) : seed_(seed), stream_(stream) {}

void Rng::refill() {
  std::array<std::uint32_t, 4> ctr{std::uint32_t(block_), std::uint32_t(block_ >> 32),
                                   std::uint32_t(stream_), std::uint32_t(stream_ >> 32)};
  out_ = philox(ctr, {std::uint32_t(seed_), std::uint32_t(seed_ >> 32)});
  ++block_;
  used_ = 0;
}

Rng::result_type Rng::operator()() {
  if (used_ > 2) refill();
  std::uint64_t v = (std::uint64_t(out_[used_]) << 32) | out_[used_ + 1];
  used_ += 2;
  return v;
}

double Rng::uniform() { return double((*this)() >> 11) * 0x1.0p-53; }

double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

double Rng::normal() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  double u1 = 1.0 - uniform();  // (0, 1]
  double u2 = uniform();
  double r = std::sqrt(-2.0 * std::log(u1));
  spare_ = r * std::sin(2.0 * 3.14159265358979323846 * u2);
  have_spare_ = true;
  return r * std::cos(2.0 * 3.14159265358979323846 * u2);
}

std::complex<double> Rng::cnormal() {
  const double s = std::sqrt(0.5);
  double re = normal();
  double im = normal();
  return {s * re, s * im};
}

Rng Rng::substream(std::uint64_t id) const { return Rng(derive_seed(seed_, stream_), id); }

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  return splitmix(splitmix(master) ^ (index * 0xD1B54A32D192ED03ull + 1));
}

}  // namespace irssec
