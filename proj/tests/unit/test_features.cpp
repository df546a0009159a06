#include "helpers.hpp"

#include "rffid/emitter.hpp"
#include "rffid/error.hpp"
#include "rffid/features.hpp"
#include "rffid/random.hpp"

#include <doctest.h>

#include <numbers>

using namespace rffid;

namespace {

LmsConfig scalar_lms()
{
    LmsConfig c;
    c.order = 1;
    c.region = pilot_region_length();
    return c;
}

} // namespace

TEST_SUITE("features")
{
    TEST_CASE("itd on signals without interior extrema")
    {
        std::vector<double> ramp(32);
        for (std::size_t i = 0; i < ramp.size(); ++i)
            ramp[i] = 0.5 * static_cast<double>(i) - 3.0;
        const auto d = itd_decompose(ramp, 4);
        REQUIRE(d.rotations.size() == 4);
        for (const auto& r : d.rotations)
            CHECK(std::all_of(r.begin(), r.end(), [](double v) { return v == 0.0; }));
        CHECK(d.baseline == ramp);

        const std::vector<double> flat(16, 2.5);
        const auto f = itd_decompose(flat, 3);
        CHECK(f.baseline == flat);
        for (const auto& r : f.rotations)
            CHECK(std::all_of(r.begin(), r.end(), [](double v) { return v == 0.0; }));

        CHECK_THROWS_AS(itd_decompose(std::vector<double>(7, 1.0), 2), InvalidInput);
    }

    TEST_CASE("itd first level by hand")
    {
        // Every interior sample is an extremum; each interior knot averages
        // the chord midpoint and the sample, which gives 1.
        const std::vector<double> x{0, 2, 0, 2, 0, 2, 0, 2};
        const auto d = itd_decompose(x, 1);
        const std::vector<double> base{0, 1, 1, 1, 1, 1, 1, 2};
        const std::vector<double> rot{0, 1, -1, 1, -1, 1, -1, 0};
        for (std::size_t i = 0; i < x.size(); ++i) {
            CHECK(d.baseline[i] == doctest::Approx(base[i]));
            CHECK(d.rotations[0][i] == doctest::Approx(rot[i]));
        }
    }

    TEST_CASE("itd components add back to the input")
    {
        const auto w = testing_support::random_waveform(300, 21);
        std::vector<double> x(w.size());
        for (std::size_t i = 0; i < x.size(); ++i)
            x[i] = w[i].real();
        const auto d = itd_decompose(x, 4);
        for (std::size_t i = 0; i < x.size(); ++i) {
            double sum = d.baseline[i];
            for (const auto& r : d.rotations)
                sum += r[i];
            CHECK(sum == doctest::Approx(x[i]).epsilon(1e-12));
        }
        // Baselines smooth: each level has fewer extrema than the one before.
        double prev = 0.0;
        for (const auto& r : d.rotations) {
            double e = 0.0;
            for (double v : r)
                e += v * v;
            if (prev > 0.0)
                CHECK(e < prev);
            prev = e;
        }
    }

    TEST_CASE("itd features")
    {
        const auto w = testing_support::random_waveform(400, 22);
        const auto fv = itd_features(w, 4);
        CHECK(fv.dim() == 20);
        CHECK(fv.method == FeatureMethod::itd);

        ComplexSequence real_only(w.size());
        for (std::size_t i = 0; i < w.size(); ++i)
            real_only[i] = w[i].real();
        const auto r = itd_features(real_only, 4);
        for (std::size_t i = 10; i < 20; ++i)
            CHECK(r.values[i] == 0.0);
        CHECK(r.values[1] > 0.0);
    }

    TEST_CASE("pilot reference")
    {
        const FrameLayout layout;
        const FilterSpec filter;
        CHECK(pilot_region_length(layout, filter) == 270);
        const auto ref = ideal_pilot_reference(layout, filter);
        REQUIRE(ref.size() == 1280);
        const std::span<const Complex> head(ref.data(), 270);
        CHECK(mean_power(head) == doctest::Approx(1.0).epsilon(0.15));
        for (std::size_t n = 400; n < ref.size(); ++n)
            CHECK(ref[n] == Complex{});
    }

    TEST_CASE("lms identifies scalar gains")
    {
        const auto ref = ideal_pilot_reference();
        const auto cfg = scalar_lms();

        const auto same = lms_features(ref, ref, cfg);
        CHECK(same.converged);
        CHECK(same.dim() == 2);
        CHECK(same.values[0] == doctest::Approx(1.0).epsilon(1e-5));
        CHECK(std::abs(same.values[1]) < 1e-5);

        ComplexSequence twice(ref.size()), rotated(ref.size());
        for (std::size_t n = 0; n < ref.size(); ++n) {
            twice[n] = 2.0 * ref[n];
            rotated[n] = Complex{0, 1} * ref[n];
        }
        const auto w2 = lms_identify(twice, ref, cfg);
        CHECK(w2.converged);
        CHECK(std::abs(w2.w[0] - 2.0) < 1e-5);
        const auto wj = lms_features(rotated, ref, cfg);
        CHECK(std::abs(wj.values[0]) < 1e-5);
        CHECK(wj.values[1] == doctest::Approx(1.0).epsilon(1e-5));
    }

    TEST_CASE("lms finds the delay")
    {
        const auto ref = ideal_pilot_reference();
        ComplexSequence late(ref.size());
        for (std::size_t n = 3; n < ref.size(); ++n)
            late[n] = ref[n - 3];
        CHECK(best_lag(late, ref, 270, 40) == 3);
        const auto r = lms_identify(late, ref, scalar_lms());
        CHECK(r.lag == 3);
        CHECK(std::abs(r.w[0] - 1.0) < 1e-4);

        auto fixed = scalar_lms();
        fixed.align = false;
        CHECK(lms_identify(late, ref, fixed).lag == 0);
    }

    TEST_CASE("lms taps of a two-tap channel")
    {
        // y(n) = a r(n) + b r(n-1) with P = 3 centred taps: w ~ [0, a, b] in window order.
        const auto ref = ideal_pilot_reference();
        const Complex a{0.9, 0.1}, b{0.2, -0.3};
        ComplexSequence y(ref.size());
        for (std::size_t n = 0; n < ref.size(); ++n)
            y[n] = a * ref[n] + (n > 0 ? b * ref[n - 1] : Complex{});
        LmsConfig cfg = scalar_lms();
        cfg.order = 3;
        cfg.align = false;
        cfg.max_epochs = 3000;
        cfg.mu = 0.05;
        const auto r = lms_identify(y, ref, cfg);
        REQUIRE(r.w.size() == 3);
        const Complex recon_a = r.w[1], recon_b = r.w[0];
        CHECK(std::abs(recon_a - a) < 0.05);
        CHECK(std::abs(recon_b - b) < 0.05);
        CHECK(std::abs(r.w[2]) < 0.05);
    }

    TEST_CASE("feature extractor")
    {
        const auto x = emit(EmitterProfile::ideal(),
                            random_frame(RandomStream(1, {0, 0, common_antenna, Purpose::bits}), FrameLayout{}));
        FeatureConfig lms;
        const FeatureExtractor fl(lms);
        CHECK(fl.dim() == 22);
        CHECK(fl(x).dim() == 22);
        CHECK(fl(x).values == fl(x).values);

        FeatureConfig itd;
        itd.method = FeatureMethod::itd;
        const FeatureExtractor fi(itd);
        CHECK(fi.dim() == 20);
        CHECK(fi(x).dim() == 20);
        // The pilot span ignores the data section.
        auto other = x;
        for (std::size_t n = 600; n < other.size(); ++n)
            other[n] = -other[n];
        CHECK(fi(x).values == fi(other).values);

        CHECK(parse_feature_method("lms") == FeatureMethod::lms);
        CHECK_THROWS_AS(parse_feature_method("fft"), ConfigError);
    }
}
