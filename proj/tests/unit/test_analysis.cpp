#include "rffid/analysis.hpp"
#include "rffid/error.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

using namespace rffid;

TEST_SUITE("analysis")
{
    TEST_CASE("erfinv inverts erf")
    {
        for (double x : {-0.999, -0.7, -0.2, 0.0, 0.1, 0.5, 0.95, 0.9999})
            CHECK(std::erf(erfinv(x)) == doctest::Approx(x).epsilon(1e-14));
        CHECK(erfinv(0.95) == doctest::Approx(1.3859038243496777).epsilon(1e-14));
        CHECK(std::isinf(erfinv(1.0)));
    }

    TEST_CASE("xi")
    {
        CHECK(xi(0.95, 15.0, 4) == doctest::Approx(0.1743).epsilon(0.003));
        CHECK(std::abs(xi(0.95, 15.0, 4) - 0.1743) < 5e-4);
        CHECK(std::abs(xi(0.95, 15.0, 16) - 0.0871) < 5e-4);
        CHECK(std::abs(xi(0.95, 5.0, 4) - 0.5510) < 5e-4);
        const double k = xi(0.9, 12.0, 1);
        for (int n : {2, 3, 10, 100, 1000})
            CHECK(xi(0.9, 12.0, n) * std::sqrt(n) == doctest::Approx(k).epsilon(1e-14));
        CHECK_THROWS_AS(xi(0.0, 15.0, 4), InvalidInput);
        CHECK_THROWS_AS(xi(1.0, 15.0, 4), InvalidInput);
        CHECK_THROWS_AS(xi(0.95, 15.0, 0), InvalidInput);
    }

    TEST_CASE("gain and antenna threshold")
    {
        CHECK(gain(1) == 0.0);
        CHECK(gain(4) == 0.5);
        CHECK(gain(16) == 0.75);
        CHECK(min_antennas(0.5) == 5);
        CHECK(min_antennas(0.0) == 2);
        CHECK(min_antennas(0.75) == 17);
        for (double p : {0.1, 0.3, 0.6, 0.9, 0.99}) {
            const int n = min_antennas(p);
            CHECK(gain(n) > p);
            CHECK_FALSE(gain(n - 1) > p);
        }
        CHECK_THROWS_AS(min_antennas(1.0), InvalidInput);
    }

    TEST_CASE("scheme selection")
    {
        CHECK(select_scheme(4, 20.0).scheme == Scheme::miws);
        CHECK(select_scheme(64, 15.0).scheme == Scheme::dfs);
        CHECK(select_scheme(256, 5.0).scheme == Scheme::dfs);
        CHECK(select_scheme(256, 10.0).scheme == Scheme::gdfws);
        CHECK(select_scheme(129, 15.0).scheme == Scheme::gdfws);
        CHECK(select_scheme(128, 15.0).scheme == Scheme::dfs);
        CHECK_FALSE(select_scheme(5, 0.0).reason.empty());
        CHECK(parse_scheme("GDFWS") == Scheme::gdfws);
        CHECK(to_string(Scheme::miws) == "MIWS");
        CHECK_THROWS(parse_scheme("best"));
    }

    TEST_CASE("xi table")
    {
        const std::vector<int> one{8};
        const auto single = xi_table(0.95, 15.0, one);
        REQUIRE(single.size() == 1);
        CHECK_FALSE(single[0].delta);

        const std::vector<int> ns{4, 8, 16};
        const auto rows = xi_table(0.95, 15.0, ns);
        REQUIRE(rows.size() == 3);
        CHECK(*rows[1].delta == doctest::Approx(rows[0].xi - rows[1].xi));

        const auto text = format_xi_table(0.95, 15.0, rows);
        CHECK(text.find("0.1743") != std::string::npos);
        CHECK(text.find("0.0871") != std::string::npos);
        CHECK(text.find("MIWS") != std::string::npos);
        CHECK(text.find("DFS") != std::string::npos);
    }

    TEST_CASE("predicted residual")
    {
        CHECK(predicted_residual_std(15.0, 1) == doctest::Approx(0.1778).epsilon(1e-3));
        CHECK(predicted_residual_std(15.0, 4) == doctest::Approx(0.0889).epsilon(1e-3));
        CHECK(predicted_residual_std(std::numeric_limits<double>::infinity(), 8) == 0.0);
    }
}
