#include "rffid/frontend.hpp"

#include "rffid/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace rffid {

namespace {

constexpr double pi = std::numbers::pi;

} // namespace

bool ChannelConfig::noise_enabled() const
{
    return std::isfinite(snr_db);
}

void ReceiverProfile::validate() const
{
    if (n_antennas < 1)
        throw InvalidInput("receiver needs at least one antenna");
    if (chi.size() != 1 && chi.size() != static_cast<std::size_t>(n_antennas))
        throw InvalidInput("chi list must have 1 or n_antennas entries, got " + std::to_string(chi.size()));
    for (double c : chi)
        if (!(c >= 0.0))
            throw InvalidInput("phase-noise bandwidth chi must be >= 0");
    if (!antenna_ids.empty() && antenna_ids.size() != static_cast<std::size_t>(n_antennas))
        throw InvalidInput("antenna_ids must be empty or have n_antennas entries");
    if (!(std::abs(jitter_delta) < 0.5))
        throw InvalidInput("|jitter delta| must be < 0.5");
    if (quantizer) {
        if (!(quant_v > 0.0))
            throw InvalidInput("quantizer range V must be > 0");
        if (quant_eps < 1)
            throw InvalidInput("quantizer bits eps must be >= 1");
    }
    if (!(phase_walk >= 0.0))
        throw InvalidInput("phase walk must be >= 0");
}

double ReceiverProfile::chi_for(std::size_t antenna) const
{
    return chi.size() == 1 ? chi.front() : chi.at(antenna);
}

std::uint64_t ReceiverProfile::id_for(std::size_t antenna) const
{
    return antenna_ids.empty() ? antenna : antenna_ids.at(antenna);
}

void AntennaCapture::validate() const
{
    if (y.empty())
        throw InvalidInput("capture has no antenna rows");
    for (const auto& row : y)
        if (row.size() != y.front().size())
            throw InvalidInput("capture rows differ in length");
}

RandomStream oscillator_stream(const StreamContext& ctx, std::uint64_t antenna_id)
{
    return RandomStream(ctx.seed, StreamCoords{ctx.trial, 0, antenna_id, Purpose::phase_noise});
}

double sample_phase_noise(const RandomStream& oscillator, double chi, std::uint64_t frame_index, PhaseModel model,
                          double walk)
{
    if (!(chi >= 0.0))
        throw InvalidInput("phase-noise bandwidth chi must be >= 0");
    if (chi == 0.0)
        return 0.0;
    const double sd = std::sqrt(2.0 * pi * chi);
    if (model == PhaseModel::tracked)
        return sd * oscillator.standard_normal(frame_index);

    double theta = sd * oscillator.standard_normal(0);
    const double step = sd * std::sqrt(walk);
    for (std::uint64_t k = 1; k <= frame_index; ++k)
        theta += step * oscillator.standard_normal(k);
    return theta;
}

ComplexSequence apply_jitter(std::span<const Complex> x, std::span<const double> delta, double lo_freq_norm)
{
    if (delta.size() != x.size())
        throw InvalidInput("jitter sequence length does not match the signal");
    const std::size_t len = x.size();
    ComplexSequence out(len);
    for (std::size_t n = 0; n < len; ++n) {
        const double d = delta[n];
        if (!(std::abs(d) < 0.5))
            throw InvalidInput("|jitter delta| must be < 0.5");
        Complex v = x[n];
        if (d != 0.0 && len >= 2) {
            // Segment [i0, i0+1] containing n + d, clamped so the ends extrapolate linearly.
            const double pos = static_cast<double>(n) + d;
            auto i0 = static_cast<std::ptrdiff_t>(std::floor(pos));
            i0 = std::clamp<std::ptrdiff_t>(i0, 0, static_cast<std::ptrdiff_t>(len) - 2);
            const double frac = pos - static_cast<double>(i0);
            const auto a = x[static_cast<std::size_t>(i0)];
            const auto b = x[static_cast<std::size_t>(i0) + 1];
            v = a + frac * (b - a);
        }
        if (lo_freq_norm != 0.0 && d != 0.0)
            v *= std::polar(1.0, -2.0 * pi * lo_freq_norm * d);
        out[n] = v;
    }
    return out;
}

ComplexSequence apply_jitter(std::span<const Complex> x, double delta, double lo_freq_norm)
{
    const std::vector<double> d(x.size(), delta);
    return apply_jitter(x, d, lo_freq_norm);
}

QuantizeResult quantize(std::span<const Complex> x, double v, int eps)
{
    if (!(v > 0.0) || eps < 1)
        throw InvalidInput("quantizer needs V > 0 and eps >= 1");
    const double step = std::ldexp(v, 1 - eps);
    QuantizeResult out;
    out.samples.resize(x.size());
    auto q = [&](double in) {
        if (in > v) {
            ++out.saturated;
            return v;
        }
        if (in < -v) {
            ++out.saturated;
            return -v;
        }
        return step * std::nearbyint(in / step);
    };
    for (std::size_t n = 0; n < x.size(); ++n)
        out.samples[n] = Complex{q(x[n].real()), q(x[n].imag())};
    return out;
}

double noise_variance(double snr_db, double signal_power, double channel_power)
{
    if (!std::isfinite(snr_db))
        return 0.0;
    return signal_power * channel_power * std::pow(10.0, -snr_db / 10.0);
}

ComplexSequence antenna_noise(const StreamContext& ctx, std::uint64_t frame_index, std::uint64_t antenna_id,
                              double sigma2, std::size_t length)
{
    ComplexSequence w(length);
    if (sigma2 == 0.0)
        return w;
    const RandomStream stream(ctx.seed, StreamCoords{ctx.trial, frame_index, antenna_id, Purpose::noise});
    const double sd = std::sqrt(sigma2 / 2.0);
    std::vector<double> unit(2 * length);
    stream.standard_normals(0, unit);
    for (std::size_t n = 0; n < length; ++n)
        w[n] = Complex{sd * unit[2 * n], sd * unit[2 * n + 1]};
    return w;
}

std::vector<double> jitter_sequence(const StreamContext& ctx, std::uint64_t frame_index, const ReceiverProfile& rx,
                                    std::size_t length)
{
    if (rx.jitter_mode == JitterMode::constant || rx.jitter_delta == 0.0)
        return std::vector<double>(length, rx.jitter_delta);
    const RandomStream stream(ctx.seed, StreamCoords{ctx.trial, frame_index, common_antenna, Purpose::jitter});
    const double a = std::abs(rx.jitter_delta);
    return stream.draw(Uniform{-a, a}, length);
}

AntennaCapture receive(std::span<const Complex> x2, const ChannelConfig& channel, const ReceiverProfile& rx,
                       std::uint64_t frame_index, const StreamContext& ctx, bool keep_truth)
{
    const double snr[] = {channel.snr_db};
    return std::move(receive_sweep(x2, channel.fading, snr, rx, frame_index, ctx, keep_truth).front());
}

std::vector<AntennaCapture> receive_sweep(std::span<const Complex> x2, Fading fading, std::span<const double> snr_list,
                                          const ReceiverProfile& rx, std::uint64_t frame_index,
                                          const StreamContext& ctx, bool keep_truth)
{
    if (x2.empty())
        throw InvalidInput("receive needs a non-empty waveform");
    for (double s : snr_list)
        if (std::isnan(s) || s == -std::numeric_limits<double>::infinity())
            throw InvalidInput("SNR must be finite or +inf");
    rx.validate();

    const std::size_t len = x2.size();
    const auto n = static_cast<std::size_t>(rx.n_antennas);
    const auto delta = jitter_sequence(ctx, frame_index, rx, len);
    const ComplexSequence x_hat = apply_jitter(x2, delta, rx.lo_freq_norm);

    std::vector<AntennaCapture> caps(snr_list.size());
    for (std::size_t s = 0; s < caps.size(); ++s) {
        caps[s].frame_index = frame_index;
        caps[s].snr_db = snr_list[s];
        caps[s].y.resize(n);
    }
    std::vector<Complex> h(n, Complex{1.0, 0.0});
    std::vector<double> theta(n);
    ComplexSequence clean(len);
    std::vector<double> unit(2 * len);

    for (std::size_t i = 0; i < n; ++i) {
        const std::uint64_t id = rx.id_for(i);
        if (fading == Fading::rayleigh) {
            const RandomStream fs(ctx.seed, StreamCoords{ctx.trial, frame_index, id, Purpose::fading});
            h[i] = Complex{fs.standard_normal(0), fs.standard_normal(1)} / std::numbers::sqrt2;
        }
        theta[i] = sample_phase_noise(oscillator_stream(ctx, id), rx.chi_for(i), frame_index, rx.phase_model,
                                      rx.phase_walk);
        const Complex phi = h[i] * std::polar(1.0, -theta[i]);
        for (std::size_t k = 0; k < len; ++k)
            clean[k] = phi * x_hat[k];

        bool drawn = false;
        for (std::size_t s = 0; s < caps.size(); ++s) {
            const double sigma2 = noise_variance(snr_list[s]);
            ComplexSequence row = clean;
            if (sigma2 > 0.0) {
                if (!drawn) {
                    const RandomStream ns(ctx.seed, StreamCoords{ctx.trial, frame_index, id, Purpose::noise});
                    ns.standard_normals(0, unit);
                    drawn = true;
                }
                const double sd = std::sqrt(sigma2 / 2.0);
                for (std::size_t k = 0; k < len; ++k)
                    row[k] += Complex{sd * unit[2 * k], sd * unit[2 * k + 1]};
            }
            if (rx.quantizer) {
                auto q = quantize(row, rx.quant_v, rx.quant_eps);
                caps[s].saturated += q.saturated;
                row = std::move(q.samples);
            }
            caps[s].y[i] = std::move(row);
        }
    }
    if (keep_truth)
        for (auto& c : caps)
            c.truth = CaptureTruth{h, theta, x_hat, noise_variance(c.snr_db)};
    return caps;
}

} // namespace rffid
