#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace rffid {

using Complex = std::complex<double>;
using ComplexSequence = std::vector<Complex>;

class RandomStream;

struct FrameLayout {
    int symbol_count = 128;
    int pilot_count = 32;
    int oversampling = 10;
};

struct Frame {
    std::vector<Complex> symbols;
    std::vector<bool> pilot_mask;
    int pilot_count = 0;
    int oversampling = 10;

    std::size_t symbol_count() const { return symbols.size(); }
    std::size_t sample_count() const { return symbols.size() * static_cast<std::size_t>(oversampling); }
    bool operator==(const Frame&) const = default;
};

/// Gray-mapped QPSK: 00 -> (1+j)/sqrt2, 01 -> (-1+j)/sqrt2, 11 -> (-1-j)/sqrt2, 10 -> (1-j)/sqrt2.
std::vector<Complex> map_qpsk(std::span<const std::uint8_t> bits);

/// Pilots first, data after. Bit counts must match the layout exactly.
Frame build_frame(std::span<const std::uint8_t> data_bits, std::span<const std::uint8_t> pilot_bits,
                  const FrameLayout& layout);

/// The fixed pilot bit sequence shared by transmitter and receiver (seed-0 stream).
std::vector<std::uint8_t> published_pilot_bits(int pilot_count);

/// Frame with published pilots and data bits drawn from `stream`.
Frame random_frame(const RandomStream& stream, const FrameLayout& layout);

/// Frame carrying only the published pilots; data symbols are zero.
Frame pilot_only_frame(const FrameLayout& layout);

struct MomentSummary {
    Complex mean;
    double variance = 0.0;
    double skewness = 0.0;
    double kurtosis = 0.0;
};

struct RealMoments {
    double mean = 0.0;
    double variance = 0.0;
    double skewness = 0.0;
    double kurtosis = 0.0;
};

/// Population moments; kurtosis is non-excess. Zero variance reports skewness
/// and kurtosis as 0.
RealMoments moments(std::span<const double> x);

/// Complex mean, E|x - mu|^2, and skewness/kurtosis averaged over the I and Q channels.
MomentSummary moments(std::span<const Complex> x);

double mean_power(std::span<const Complex> x);

} // namespace rffid
