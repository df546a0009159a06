#include "rffid/random.hpp"

#include "rffid/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace rffid {

namespace {

constexpr std::uint64_t golden = 0x9E3779B97F4A7C15ULL;

std::uint64_t absorb(std::uint64_t key, std::uint64_t value, std::uint64_t lane)
{
    return mix64(key ^ mix64(value + lane * golden));
}

} // namespace

std::uint64_t mix64(std::uint64_t x)
{
    // splitmix64 finalizer
    x += golden;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

RandomStream::RandomStream(std::uint64_t seed, const StreamCoords& coords)
    : seed_(seed), coords_(coords)
{
    std::uint64_t k = mix64(seed);
    k = absorb(k, coords.trial, 1);
    k = absorb(k, coords.frame, 2);
    k = absorb(k, coords.antenna, 3);
    k = absorb(k, static_cast<std::uint64_t>(coords.purpose), 4);
    key_ = k;
}

std::uint64_t RandomStream::bits(std::uint64_t counter) const
{
    return mix64(key_ ^ mix64(counter * golden + 0x632BE59BD9B4E019ULL));
}

double RandomStream::uniform(std::uint64_t counter) const
{
    return static_cast<double>(bits(counter) >> 11) * 0x1.0p-53;
}

double RandomStream::standard_normal(std::uint64_t index) const
{
    const std::uint64_t pair = index / 2;
    const double u1 = 1.0 - uniform(2 * pair); // (0, 1]
    const double u2 = uniform(2 * pair + 1);
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    return (index % 2 == 0) ? r * std::cos(angle) : r * std::sin(angle);
}

void RandomStream::standard_normals(std::uint64_t offset, std::span<double> out) const
{
    std::size_t i = 0;
    if (offset % 2 == 1 && !out.empty())
        out[i++] = standard_normal(offset);
    for (; i + 1 < out.size(); i += 2) {
        const std::uint64_t pair = (offset + i) / 2;
        const double u1 = 1.0 - uniform(2 * pair);
        const double u2 = uniform(2 * pair + 1);
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * std::numbers::pi * u2;
        out[i] = r * std::cos(angle);
        out[i + 1] = r * std::sin(angle);
    }
    if (i < out.size())
        out[i] = standard_normal(offset + i);
}

std::vector<double> RandomStream::draw(const Distribution& dist, std::size_t count,
                                       std::uint64_t offset) const
{
    std::vector<double> out(count);
    if (const auto* g = std::get_if<Gaussian>(&dist)) {
        if (!(g->variance >= 0.0))
            throw InvalidInput("gaussian variance must be non-negative");
        const double sd = std::sqrt(g->variance);
        if (sd == 0.0) {
            std::fill(out.begin(), out.end(), g->mean);
            return out;
        }
        standard_normals(offset, out);
        for (auto& v : out)
            v = g->mean + sd * v;
    } else {
        const auto& u = std::get<Uniform>(dist);
        if (!(u.lo <= u.hi))
            throw InvalidInput("uniform bounds must satisfy lo <= hi");
        const double width = u.hi - u.lo;
        for (std::size_t i = 0; i < count; ++i)
            out[i] = u.lo + width * uniform(offset + i);
    }
    return out;
}

} // namespace rffid
