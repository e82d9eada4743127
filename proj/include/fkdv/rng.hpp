#pragma once

#include "fkdv/field.hpp"

#include <cstdint>
#include <random>
#include <string_view>

namespace fkdv {

/// Deterministic substream derived from a root seed and a stream name, so
/// every ensemble in the artifact reproduces from one config-level seed.
std::mt19937_64 substream(std::uint64_t seed, std::string_view name);

/// Mean-zero random field with independent Gaussian spectral coefficients on
/// modes 1..band_limit and zero above; normalized to unit L2 norm.
Field random_band_limited(GridPtr grid, std::size_t band_limit, std::mt19937_64& rng);

/// Same, but with a smooth spectral decay exp(-(k/band_limit)^2) so high
/// derivatives stay tame (used by the inequality probes).
Field random_smooth(GridPtr grid, std::size_t band_limit, std::mt19937_64& rng);

} // namespace fkdv
