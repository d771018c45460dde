#include "hjmcal/philox.hpp"

#include <cmath>

#include "hjmcal/normal.hpp"

namespace hjmcal {
namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void round_once(std::array<std::uint32_t, 4>& c, std::array<std::uint32_t, 2>& k) {
  const std::uint64_t p0 = static_cast<std::uint64_t>(kPhiloxM0) * c[0];
  const std::uint64_t p1 = static_cast<std::uint64_t>(kPhiloxM1) * c[2];
  const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
  const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
  const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
  const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
  c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
  k[0] += kWeyl0;
  k[1] += kWeyl1;
}

inline double to_unit(std::uint64_t bits) {
  // 53-bit mantissa mapped to (0, 1): never returns an exact endpoint.
  return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 2> key,
                                        std::array<std::uint32_t, 4> counter) {
  for (int r = 0; r < 10; ++r) round_once(counter, key);
  return counter;
}

std::array<double, 2> philox_uniform2(std::uint64_t seed, std::uint64_t stream,
                                      std::uint64_t step, std::uint64_t block) {
  const std::array<std::uint32_t, 2> key = {static_cast<std::uint32_t>(seed),
                                            static_cast<std::uint32_t>(seed >> 32)};
  // stream gets 64 bits; step/block get 32 each. Grids and path counts stay far
  // below 2^32 ranges in practice.
  const std::array<std::uint32_t, 4> ctr = {
      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32),
      static_cast<std::uint32_t>(step ^ (block << 20)),
      static_cast<std::uint32_t>((step >> 32) ^ block)};
  const auto out = philox4x32(key, ctr);
  const std::uint64_t a = (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
  const std::uint64_t b = (static_cast<std::uint64_t>(out[2]) << 32) | out[3];
  return {to_unit(a), to_unit(b)};
}

std::array<double, 2> philox_normal2(std::uint64_t seed, std::uint64_t stream,
                                     std::uint64_t step, std::uint64_t block) {
  const auto u = philox_uniform2(seed, stream, step, block);
  return {normal_inv_cdf(u[0]), normal_inv_cdf(u[1])};
}

double RngStream::uniform() {
  // Distinct block namespaces keep uniform() and normal() draws collision-free
  // while sharing one counter.
  const auto u = philox_uniform2(seed_, stream_, counter_++, 0x80000000ull);
  return u[0];
}

double RngStream::uniform(double a, double b) { return a + (b - a) * uniform(); }

double RngStream::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const auto u = philox_uniform2(seed_, stream_, counter_++, 0x40000000ull);
  spare_ = normal_inv_cdf(u[1]);
  has_spare_ = true;
  return normal_inv_cdf(u[0]);
}

double RngStream::lognormal(double mu, double sigma) {
  return std::exp(mu + sigma * normal());
}

std::uint64_t RngStream::uint64() {
  const std::array<std::uint32_t, 2> key = {static_cast<std::uint32_t>(seed_),
                                            static_cast<std::uint32_t>(seed_ >> 32)};
  const std::array<std::uint32_t, 4> ctr = {
      static_cast<std::uint32_t>(stream_), static_cast<std::uint32_t>(stream_ >> 32),
      static_cast<std::uint32_t>(counter_), 0xABCD1234u};
  ++counter_;
  const auto out = philox4x32(key, ctr);
  return (static_cast<std::uint64_t>(out[0]) << 32) | out[2];
}

}  // namespace hjmcal
