#pragma once

#include <array>
#include <cstdint>

namespace hjmcal {

// Philox4x32-10 counter-based generator. Stateless block function: the same
// (key, counter) always yields the same block on every platform, which is what
// makes shared-noise comparisons and worker-count-independent reductions possible.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 2> key,
                                        std::array<std::uint32_t, 4> counter);

// Two uniform doubles in (0, 1) from one Philox block addressed by
// (seed, stream, step, block). stream/path and step index the simulation grid;
// block indexes 2-wide groups of dimensions within one step.
std::array<double, 2> philox_uniform2(std::uint64_t seed, std::uint64_t stream,
                                      std::uint64_t step, std::uint64_t block);

// Standard normals via the inverse CDF of the uniforms above.
std::array<double, 2> philox_normal2(std::uint64_t seed, std::uint64_t stream,
                                     std::uint64_t step, std::uint64_t block);

// Sequential convenience stream over the same generator (used for parameter
// initialization noise and synthetic-data perturbations).
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed, std::uint64_t stream = 0)
      : seed_(seed), stream_(stream) {}

  double uniform();                       // (0, 1)
  double uniform(double a, double b);     // (a, b)
  double normal();                        // N(0, 1)
  double lognormal(double mu, double sigma);
  std::uint64_t uint64();

 private:
  std::uint64_t seed_, stream_;
  std::uint64_t counter_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace hjmcal
