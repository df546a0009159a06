#pragma once

#include "rffid/random.hpp"
#include "rffid/signal.hpp"

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <vector>

namespace rffid {

enum class Fading {
    unit,      // h = 1
    rayleigh,  // h ~ CN(0, 1), drawn per frame per antenna
};

struct ChannelConfig {
    double snr_db = std::numeric_limits<double>::infinity();  // +inf disables noise
    Fading fading = Fading::unit;

    bool noise_enabled() const;
};

enum class JitterMode {
    constant,  // delta(n) = delta
    uniform,   // delta(n) ~ U[-|delta|, |delta|], common to all antennas
};

enum class PhaseModel {
    tracked,  // theta_i(k) ~ N(0, 2 pi chi), independent per frame
    wiener,   // theta_i(k) = theta_i(k-1) + N(0, 2 pi chi * walk), theta_i(0) ~ N(0, 2 pi chi)
};

struct ReceiverProfile {
    int n_antennas = 1;
    std::vector<double> chi{0.0};         // one entry (shared) or one per antenna
    std::vector<std::uint64_t> antenna_ids;  // stream identity per row; empty means 0..N-1
    double jitter_delta = 0.0;
    JitterMode jitter_mode = JitterMode::constant;
    double lo_freq_norm = 0.0;            // f' T
    bool quantizer = true;
    double quant_v = 1.0;
    int quant_eps = 16;
    PhaseModel phase_model = PhaseModel::tracked;
    double phase_walk = 1.0;              // frame duration in normalized time (wiener model)

    void validate() const;
    double chi_for(std::size_t antenna) const;
    std::uint64_t id_for(std::size_t antenna) const;
};

struct StreamContext {
    std::uint64_t seed = 0;
    std::uint64_t trial = 0;
};

struct CaptureTruth {
    std::vector<Complex> h;
    std::vector<double> theta;
    ComplexSequence x_hat;       // jittered emitter waveform, common to all antennas
    double noise_variance = 0.0; // configured sigma_w^2
};

/// One frame as seen by N antennas: the N x L matrix Y plus optional ground truth.
struct AntennaCapture {
    std::vector<ComplexSequence> y;
    std::optional<CaptureTruth> truth;
    std::uint64_t frame_index = 0;
    int emitter = -1;
    double snr_db = std::numeric_limits<double>::infinity();
    std::size_t saturated = 0;

    std::size_t n_antennas() const { return y.size(); }
    std::size_t length() const { return y.empty() ? 0 : y.front().size(); }
    void validate() const;
};

/// Phase of one antenna's oscillator at frame k. `oscillator` identifies the
/// antenna; the frame index is the stream counter.
double sample_phase_noise(const RandomStream& oscillator, double chi, std::uint64_t frame_index,
                          PhaseModel model = PhaseModel::tracked, double walk = 1.0);

RandomStream oscillator_stream(const StreamContext& ctx, std::uint64_t antenna_id);

/// out(n) = interp(x, n + delta(n)) * exp(-j 2 pi lo_freq_norm delta(n)), linear interpolation.
ComplexSequence apply_jitter(std::span<const Complex> x, std::span<const double> delta, double lo_freq_norm);
ComplexSequence apply_jitter(std::span<const Complex> x, double delta, double lo_freq_norm);

struct QuantizeResult {
    ComplexSequence samples;
    std::size_t saturated = 0;  // real channels clipped to +-V
};

/// Mid-tread uniform quantizer per real channel, step 2^(1-eps) V, range [-V, V].
QuantizeResult quantize(std::span<const Complex> x, double v, int eps);

/// sigma_w^2 = signal_power * channel_power * 10^(-snr/10); zero for infinite SNR.
double noise_variance(double snr_db, double signal_power = 1.0, double channel_power = 1.0);

/// Complex gaussian noise row of one antenna (per-channel variance sigma2 / 2).
ComplexSequence antenna_noise(const StreamContext& ctx, std::uint64_t frame_index, std::uint64_t antenna_id,
                              double sigma2, std::size_t length);

std::vector<double> jitter_sequence(const StreamContext& ctx, std::uint64_t frame_index,
                                    const ReceiverProfile& rx, std::size_t length);

AntennaCapture receive(std::span<const Complex> x2, const ChannelConfig& channel, const ReceiverProfile& rx,
                       std::uint64_t frame_index, const StreamContext& ctx, bool keep_truth = true);

/// One capture per SNR. Noise, phase and fading draws are shared across the
/// sweep, so element s equals receive() at snr_list[s].
std::vector<AntennaCapture> receive_sweep(std::span<const Complex> x2, Fading fading, std::span<const double> snr_list,
                                          const ReceiverProfile& rx, std::uint64_t frame_index,
                                          const StreamContext& ctx, bool keep_truth = true);

} // namespace rffid
