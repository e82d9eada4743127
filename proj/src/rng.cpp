#include "fkdv/rng.hpp"

#include "fkdv/errors.hpp"
#include "fkdv/spectral.hpp"

#include <cmath>

namespace fkdv {

std::mt19937_64 substream(std::uint64_t seed, std::string_view name) {
    // FNV-1a over the stream name, mixed with the root seed.
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : name) {
        h ^= c;
        h *= 1099511628211ull;
    }
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(h), static_cast<std::uint32_t>(h >> 32)};
    return std::mt19937_64(seq);
}

namespace {

Field random_spectrum(GridPtr grid, std::size_t band_limit, std::mt19937_64& rng, bool decay) {
    if (band_limit >= grid->spectrum_size())
        throw ConfigError("random field band limit exceeds the grid's spectrum");
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<cplx> spec(grid->spectrum_size(), cplx(0.0, 0.0));
    for (std::size_t k = 1; k <= band_limit; ++k) {
        double amp = decay ? std::exp(-std::pow(static_cast<double>(k) / band_limit, 2)) : 1.0;
        spec[k] = amp * cplx(gauss(rng), gauss(rng));
    }
    Field f(std::move(grid), std::move(spec));
    const double norm = lp_norm(f, 2.0);
    std::vector<double> v(f.values().begin(), f.values().end());
    if (norm > 0.0)
        for (double& x : v) x /= norm;
    return f.with_values(std::move(v));
}

} // namespace

Field random_band_limited(GridPtr grid, std::size_t band_limit, std::mt19937_64& rng) {
    return random_spectrum(std::move(grid), band_limit, rng, false);
}

Field random_smooth(GridPtr grid, std::size_t band_limit, std::mt19937_64& rng) {
    return random_spectrum(std::move(grid), band_limit, rng, true);
}

} // namespace fkdv
