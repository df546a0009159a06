#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <variant>
#include <vector>

namespace rffid {

enum class Purpose : std::uint32_t {
    bits = 1,
    pilot,
    phase_noise,
    noise,
    fading,
    jitter,
    shuffle,
};

// Antenna coordinate for draws shared by all antennas of a receiver.
inline constexpr std::uint64_t common_antenna = std::numeric_limits<std::uint64_t>::max();

struct StreamCoords {
    std::uint64_t trial = 0;
    std::uint64_t frame = 0;
    std::uint64_t antenna = common_antenna;
    Purpose purpose = Purpose::bits;
};

struct Gaussian {
    double mean = 0.0;
    double variance = 1.0;
};

struct Uniform {
    double lo = 0.0;
    double hi = 1.0;
};

using Distribution = std::variant<Gaussian, Uniform>;

/// Counter-based random stream. Element i of the stream is a pure function of
/// (seed, coordinates, i), so draws never depend on call order or threading.
class RandomStream {
public:
    RandomStream(std::uint64_t seed, const StreamCoords& coords);

    std::uint64_t bits(std::uint64_t counter) const;
    /// Uniform in [0, 1).
    double uniform(std::uint64_t counter) const;
    /// Standard normal; element i uses counters 2*(i/2) and 2*(i/2)+1 (Box-Muller pair).
    double standard_normal(std::uint64_t index) const;

    /// out[i] = standard_normal(offset + i), computing each Box-Muller pair once.
    void standard_normals(std::uint64_t offset, std::span<double> out) const;

    std::vector<double> draw(const Distribution& dist, std::size_t count,
                             std::uint64_t offset = 0) const;

    std::uint64_t seed() const { return seed_; }
    const StreamCoords& coords() const { return coords_; }

private:
    std::uint64_t seed_;
    StreamCoords coords_;
    std::uint64_t key_;
};

std::uint64_t mix64(std::uint64_t x);

} // namespace rffid
