#include "helpers.hpp"

#include "rffid/capture_io.hpp"
#include "rffid/error.hpp"

#include <doctest.h>

#include <fstream>
#include <sstream>

using namespace rffid;

TEST_SUITE("capture_io")
{
    TEST_CASE("json round trip is bit exact")
    {
        ReceiverProfile rx;
        rx.n_antennas = 3;
        rx.chi = {0.01};
        rx.jitter_delta = 0.003;
        rx.lo_freq_norm = 100.0;
        const auto x = testing_support::random_waveform(64, 12);
        auto cap = receive(x, ChannelConfig{12.5, Fading::rayleigh}, rx, 7, StreamContext{3, 1});
        cap.emitter = 2;

        const auto back = capture_from_json(capture_to_json(cap));
        CHECK(back.y == cap.y);
        CHECK(back.emitter == 2);
        CHECK(back.frame_index == 7);
        CHECK(back.snr_db == 12.5);
        CHECK(back.saturated == cap.saturated);
        REQUIRE(back.truth);
        CHECK(back.truth->h == cap.truth->h);
        CHECK(back.truth->theta == cap.truth->theta);
        CHECK(back.truth->x_hat == cap.truth->x_hat);
        CHECK(back.truth->noise_variance == cap.truth->noise_variance);

        const auto bare = capture_from_json(capture_to_json(cap, false));
        CHECK_FALSE(bare.truth);
        CHECK(capture_to_json(cap, false).find("truth") == std::string::npos);
    }

    TEST_CASE("infinite snr survives")
    {
        AntennaCapture cap;
        cap.y = {ComplexSequence{{1.0, -0.5}}};
        const auto text = capture_to_json(cap, false);
        CHECK(text.find("null") != std::string::npos);
        CHECK(std::isinf(capture_from_json(text).snr_db));
    }

    TEST_CASE("files")
    {
        const auto dir = testing_support::scratch("capture_io");
        std::vector<AntennaCapture> caps(2);
        caps[0].y = {testing_support::random_waveform(5, 1), testing_support::random_waveform(5, 2)};
        caps[1].y = {testing_support::random_waveform(5, 3), testing_support::random_waveform(5, 4)};
        caps[1].frame_index = 1;
        write_captures(dir / "c.jsonl", caps, false);
        const auto back = read_captures(dir / "c.jsonl");
        REQUIRE(back.size() == 2);
        CHECK(back[1].y == caps[1].y);

        std::ostringstream a, b;
        write_captures(a, caps);
        write_captures(b, back);
        CHECK(a.str() == b.str());

        CHECK_THROWS_AS(read_captures(dir / "missing.jsonl"), IoError);
        CHECK_THROWS(capture_from_json("{\"samples\": 3}"));
    }

    TEST_CASE("real formatting")
    {
        CHECK(std::stod(format_real(0.1)) == 0.1);
        CHECK(std::stod(format_real(1.0 / 3.0)) == 1.0 / 3.0);
    }
}
