#include "helpers.hpp"

#include "rffid/emitter.hpp"
#include "rffid/error.hpp"
#include "rffid/frontend.hpp"

#include <doctest.h>

#include <numbers>

using namespace rffid;

namespace {

ReceiverProfile clean_receiver(int n)
{
    ReceiverProfile rx;
    rx.n_antennas = n;
    rx.quantizer = false;
    return rx;
}

} // namespace

TEST_SUITE("frontend")
{
    TEST_CASE("phase noise")
    {
        const StreamContext ctx{11, 0};
        for (std::uint64_t k = 0; k < 5; ++k)
            CHECK(sample_phase_noise(oscillator_stream(ctx, 0), 0.0, k) == 0.0);
        CHECK_THROWS_AS(sample_phase_noise(oscillator_stream(ctx, 0), -0.1, 0), InvalidInput);

        const double chi = 0.01;
        const int count = 100'000;
        double sa = 0, sb = 0, saa = 0, sbb = 0, sab = 0;
        for (int t = 0; t < count; ++t) {
            const StreamContext c{11, static_cast<std::uint64_t>(t)};
            const double a = sample_phase_noise(oscillator_stream(c, 0), chi, 1);
            const double b = sample_phase_noise(oscillator_stream(c, 1), chi, 1);
            sa += a;
            sb += b;
            saa += a * a;
            sbb += b * b;
            sab += a * b;
        }
        const double n = count;
        const double va = saa / n - (sa / n) * (sa / n);
        const double vb = sbb / n - (sb / n) * (sb / n);
        const double cov = sab / n - (sa / n) * (sb / n);
        CHECK(std::abs(va / (2 * std::numbers::pi * chi) - 1.0) < 0.03);
        CHECK(std::abs(cov / std::sqrt(va * vb)) < 0.02);

        // The walk model starts from the same first draw and accumulates.
        const auto osc = oscillator_stream(ctx, 3);
        CHECK(sample_phase_noise(osc, chi, 0, PhaseModel::wiener) == sample_phase_noise(osc, chi, 0));
        const double sd = std::sqrt(2 * std::numbers::pi * chi);
        CHECK(sample_phase_noise(osc, chi, 2, PhaseModel::wiener, 0.5) ==
              doctest::Approx(sd * (osc.standard_normal(0) + std::sqrt(0.5) * (osc.standard_normal(1) +
                                                                                 osc.standard_normal(2)))));
    }

    TEST_CASE("jitter")
    {
        const auto x = testing_support::random_waveform(32, 7);
        CHECK(apply_jitter(x, 0.0, 100.0) == x);

        ComplexSequence ramp(20);
        for (std::size_t n = 0; n < ramp.size(); ++n)
            ramp[n] = static_cast<double>(n);
        const auto r = apply_jitter(ramp, 0.1, 0.0);
        for (std::size_t n = 0; n < ramp.size(); ++n)
            CHECK(std::abs(r[n] - (static_cast<double>(n) + 0.1)) < 1e-12);
        const auto back = apply_jitter(ramp, -0.1, 0.0);
        CHECK(std::abs(back[0] - Complex{-0.1}) < 1e-12);

        const ComplexSequence flat(16, Complex{0.6, -0.2});
        const auto rot = apply_jitter(flat, 0.003, 100.0);
        const Complex phase = std::polar(1.0, -2 * std::numbers::pi * 0.3);
        for (const auto& v : rot)
            CHECK(std::abs(v - flat[0] * phase) < 1e-12);

        CHECK_THROWS_AS(apply_jitter(x, 0.7, 0.0), InvalidInput);
        const std::vector<double> short_delta(3, 0.0);
        CHECK_THROWS_AS(apply_jitter(x, short_delta, 0.0), InvalidInput);
    }

    TEST_CASE("quantizer")
    {
        const std::vector<Complex> zero{Complex{}};
        CHECK(quantize(zero, 1.0, 16).samples[0] == Complex{});
        const std::vector<Complex> tiny{Complex{0.4 * std::ldexp(1.0, -15), 0.0}};
        CHECK(quantize(tiny, 1.0, 16).samples[0] == Complex{});
        const std::vector<Complex> over{Complex{1.5, -2.0}, Complex{0.2, 0.0}};
        const auto q = quantize(over, 1.0, 16);
        CHECK(q.samples[0] == Complex{1.0, -1.0});
        CHECK(q.saturated == 2);
        CHECK_THROWS_AS(quantize(zero, 0.0, 16), InvalidInput);

        const RandomStream s(3, {0, 0, 0, Purpose::noise});
        const auto u = s.draw(Uniform{-1.0, 1.0}, 200'000);
        std::vector<Complex> x(u.size() / 2);
        for (std::size_t i = 0; i < x.size(); ++i)
            x[i] = {u[2 * i], u[2 * i + 1]};
        const auto out = quantize(x, 1.0, 16);
        double worst = 0.0, sq = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            const Complex e = out.samples[i] - x[i];
            worst = std::max({worst, std::abs(e.real()), std::abs(e.imag())});
            sq += std::norm(e);
        }
        CHECK(worst <= std::ldexp(1.0, -16));
        CHECK(std::abs(sq / (2.0 * static_cast<double>(x.size())) / (std::ldexp(1.0, -32) / 3.0) - 1.0) < 0.02);
    }

    TEST_CASE("noise")
    {
        CHECK(noise_variance(std::numeric_limits<double>::infinity()) == 0.0);
        CHECK(noise_variance(15.0) == doctest::Approx(std::pow(10.0, -1.5)));
        CHECK(noise_variance(10.0, 2.0, 0.5) == doctest::Approx(0.1));

        const StreamContext ctx{1, 2};
        const auto w = antenna_noise(ctx, 0, 0, noise_variance(15.0), 100'000);
        CHECK(mean_power(w) == doctest::Approx(std::pow(10.0, -1.5)).epsilon(0.03));
        double re = 0.0;
        for (const auto& v : w)
            re += v.real() * v.real();
        CHECK(re / 100'000 == doctest::Approx(std::pow(10.0, -1.5) / 2).epsilon(0.03));
        CHECK(antenna_noise(ctx, 0, 0, 0.1, 10) == antenna_noise(ctx, 0, 0, 0.1, 10));
        CHECK(antenna_noise(ctx, 0, 0, 0.1, 10) != antenna_noise(ctx, 0, 1, 0.1, 10));
    }

    TEST_CASE("impairment-free receive is the identity")
    {
        const auto x = testing_support::random_waveform(1280, 8);
        const auto cap = receive(x, ChannelConfig{}, clean_receiver(4), 3, StreamContext{1, 0});
        REQUIRE(cap.n_antennas() == 4);
        CHECK(cap.length() == 1280);
        for (const auto& row : cap.y)
            CHECK(row == x);
        REQUIRE(cap.truth);
        CHECK(cap.truth->x_hat == x);
        CHECK(cap.truth->noise_variance == 0.0);
        CHECK(cap.frame_index == 3);
    }

    TEST_CASE("received noise level")
    {
        ComplexSequence x(100'000, Complex{1.0, 0.0});
        const auto cap = receive(x, ChannelConfig{15.0, Fading::unit}, clean_receiver(2), 0, StreamContext{4, 0});
        for (const auto& row : cap.y) {
            double e = 0.0;
            for (std::size_t k = 0; k < x.size(); ++k)
                e += std::norm(row[k] - x[k]);
            CHECK(e / static_cast<double>(x.size()) == doctest::Approx(std::pow(10.0, -1.5)).epsilon(0.03));
        }
        CHECK(cap.y[0] != cap.y[1]);
    }

    TEST_CASE("phase and channel follow the truth")
    {
        auto rx = clean_receiver(3);
        rx.chi = {0.01, 0.1, 1.0};
        const auto x = testing_support::random_waveform(256, 9);
        const auto cap = receive(x, ChannelConfig{std::numeric_limits<double>::infinity(), Fading::rayleigh}, rx, 5,
                                 StreamContext{2, 1});
        REQUIRE(cap.truth);
        for (std::size_t i = 0; i < 3; ++i) {
            const Complex phi = cap.truth->h[i] * std::polar(1.0, -cap.truth->theta[i]);
            for (std::size_t k = 0; k < x.size(); ++k)
                CHECK(std::abs(cap.y[i][k] - phi * x[k]) < 1e-12);
        }
        CHECK(cap.truth->theta[0] != cap.truth->theta[1]);
    }

    TEST_CASE("sweep equals per-SNR receive")
    {
        ReceiverProfile rx;
        rx.n_antennas = 3;
        rx.chi = {0.01};
        rx.jitter_delta = 0.003;
        rx.lo_freq_norm = 100.0;
        rx.quant_v = 4.0;
        const auto x = testing_support::random_waveform(400, 10);
        const std::vector<double> snr{10.0, 20.0, std::numeric_limits<double>::infinity()};
        const StreamContext ctx{9, 4};
        const auto sweep = receive_sweep(x, Fading::rayleigh, snr, rx, 2, ctx);
        REQUIRE(sweep.size() == 3);
        for (std::size_t s = 0; s < snr.size(); ++s) {
            const auto one = receive(x, ChannelConfig{snr[s], Fading::rayleigh}, rx, 2, ctx);
            CHECK(one.y == sweep[s].y);
            CHECK(one.truth->theta == sweep[s].truth->theta);
            CHECK(one.saturated == sweep[s].saturated);
        }
    }

    TEST_CASE("jitter modes")
    {
        ReceiverProfile rx;
        rx.jitter_delta = 0.003;
        const StreamContext ctx{1, 0};
        const auto c = jitter_sequence(ctx, 0, rx, 10);
        CHECK(std::all_of(c.begin(), c.end(), [](double d) { return d == 0.003; }));
        rx.jitter_mode = JitterMode::uniform;
        const auto u = jitter_sequence(ctx, 0, rx, 1000);
        CHECK(std::all_of(u.begin(), u.end(), [](double d) { return std::abs(d) <= 0.003; }));
        CHECK(u != jitter_sequence(ctx, 1, rx, 1000));
    }

    TEST_CASE("receiver validation")
    {
        ReceiverProfile rx;
        rx.n_antennas = 4;
        rx.chi = {0.1, 0.2};
        CHECK_THROWS_AS(rx.validate(), InvalidInput);
        rx.chi = {0.1, 0.2, 0.3, 0.4};
        CHECK_NOTHROW(rx.validate());
        CHECK(rx.chi_for(2) == 0.3);
        rx.n_antennas = 0;
        CHECK_THROWS_AS(rx.validate(), InvalidInput);
    }
}
