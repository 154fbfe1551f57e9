#pragma once

#include <cstdint>
#include <random>

namespace nmc {

// One stream per chain; never shared across threads.
using Rng = std::mt19937_64;

inline Rng make_rng(std::uint64_t seed) { return Rng(seed); }

// Uniform on the open interval (0, 1).
double uniform01(Rng& rng);
double standard_normal(Rng& rng);
// log of a Gamma(shape, 1) draw; stays finite for shapes far below 1.
double log_gamma_draw(double shape, Rng& rng);
double gamma_draw(double shape, double rate, Rng& rng);

}  // namespace nmc
