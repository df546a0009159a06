#include "rffid/signal.hpp"

#include "rffid/error.hpp"
#include "rffid/random.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace rffid {

std::vector<Complex> map_qpsk(std::span<const std::uint8_t> bits)
{
    if (bits.size() % 2 != 0)
        throw InvalidInput("QPSK mapping needs an even bit count, got " + std::to_string(bits.size()));
    constexpr double a = std::numbers::sqrt2 / 2.0;
    std::vector<Complex> out;
    out.reserve(bits.size() / 2);
    for (std::size_t i = 0; i < bits.size(); i += 2) {
        const bool b0 = bits[i] != 0;
        const bool b1 = bits[i + 1] != 0;
        out.emplace_back(b1 ? -a : a, b0 ? -a : a);
    }
    return out;
}

Frame build_frame(std::span<const std::uint8_t> data_bits, std::span<const std::uint8_t> pilot_bits,
                  const FrameLayout& layout)
{
    if (layout.symbol_count < 1 || layout.pilot_count < 0 || layout.pilot_count > layout.symbol_count)
        throw InvalidInput("frame layout needs 0 <= pilot_count <= symbol_count and symbol_count >= 1");
    if (layout.oversampling < 1)
        throw InvalidInput("oversampling must be >= 1");
    const auto pilot_bit_count = static_cast<std::size_t>(2 * layout.pilot_count);
    const auto data_bit_count = static_cast<std::size_t>(2 * (layout.symbol_count - layout.pilot_count));
    if (pilot_bits.size() != pilot_bit_count)
        throw InvalidInput("expected " + std::to_string(pilot_bit_count) + " pilot bits, got " +
                           std::to_string(pilot_bits.size()));
    if (data_bits.size() != data_bit_count)
        throw InvalidInput("expected " + std::to_string(data_bit_count) + " data bits, got " +
                           std::to_string(data_bits.size()));

    Frame frame;
    frame.symbols = map_qpsk(pilot_bits);
    const auto data = map_qpsk(data_bits);
    frame.symbols.insert(frame.symbols.end(), data.begin(), data.end());
    frame.pilot_mask.assign(frame.symbols.size(), false);
    for (int i = 0; i < layout.pilot_count; ++i)
        frame.pilot_mask[static_cast<std::size_t>(i)] = true;
    frame.pilot_count = layout.pilot_count;
    frame.oversampling = layout.oversampling;
    return frame;
}

std::vector<std::uint8_t> published_pilot_bits(int pilot_count)
{
    const RandomStream stream(0, StreamCoords{0, 0, common_antenna, Purpose::pilot});
    std::vector<std::uint8_t> bits(static_cast<std::size_t>(2 * pilot_count));
    for (std::size_t i = 0; i < bits.size(); ++i)
        bits[i] = static_cast<std::uint8_t>(stream.bits(i) >> 63);
    return bits;
}

Frame random_frame(const RandomStream& stream, const FrameLayout& layout)
{
    std::vector<std::uint8_t> data(static_cast<std::size_t>(2 * (layout.symbol_count - layout.pilot_count)));
    for (std::size_t i = 0; i < data.size(); ++i)
        data[i] = static_cast<std::uint8_t>(stream.bits(i) >> 63);
    return build_frame(data, published_pilot_bits(layout.pilot_count), layout);
}

Frame pilot_only_frame(const FrameLayout& layout)
{
    const std::vector<std::uint8_t> data(static_cast<std::size_t>(2 * (layout.symbol_count - layout.pilot_count)));
    Frame frame = build_frame(data, published_pilot_bits(layout.pilot_count), layout);
    for (std::size_t i = static_cast<std::size_t>(layout.pilot_count); i < frame.symbols.size(); ++i)
        frame.symbols[i] = Complex{};
    return frame;
}

RealMoments moments(std::span<const double> x)
{
    if (x.empty())
        throw InvalidInput("moments of an empty sequence");
    const double n = static_cast<double>(x.size());
    double mean = 0.0;
    for (double v : x)
        mean += v;
    mean /= n;
    double m2 = 0.0, m3 = 0.0, m4 = 0.0;
    for (double v : x) {
        const double d = v - mean;
        const double d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    m2 /= n;
    m3 /= n;
    m4 /= n;

    RealMoments out;
    out.mean = mean;
    // A constant sequence leaves only rounding noise in m2.
    if (m2 > 1e-28 * (1.0 + mean * mean)) {
        out.variance = m2;
        out.skewness = m3 / (m2 * std::sqrt(m2));
        out.kurtosis = m4 / (m2 * m2);
    }
    return out;
}

MomentSummary moments(std::span<const Complex> x)
{
    if (x.empty())
        throw InvalidInput("moments of an empty sequence");
    std::vector<double> re(x.size()), im(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        re[i] = x[i].real();
        im[i] = x[i].imag();
    }
    const RealMoments mr = moments(std::span<const double>(re));
    const RealMoments mi = moments(std::span<const double>(im));

    MomentSummary out;
    out.mean = Complex{mr.mean, mi.mean};
    out.variance = mr.variance + mi.variance;
    out.skewness = 0.5 * (mr.skewness + mi.skewness);
    out.kurtosis = 0.5 * (mr.kurtosis + mi.kurtosis);
    return out;
}

double mean_power(std::span<const Complex> x)
{
    if (x.empty())
        return 0.0;
    double p = 0.0;
    for (const auto& v : x)
        p += std::norm(v);
    return p / static_cast<double>(x.size());
}

} // namespace rffid
