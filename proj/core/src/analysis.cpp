#include "rffid/analysis.hpp"

#include "rffid/error.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>

namespace rffid {

double erfinv(double x)
{
    if (!(x > -1.0 && x < 1.0)) {
        if (x == 1.0)
            return INFINITY;
        if (x == -1.0)
            return -INFINITY;
        throw InvalidInput("erfinv argument must lie in [-1, 1]");
    }
    if (x == 0.0)
        return 0.0;
    // M. Giles, "Approximating the erfinv function", GPU Computing Gems (2011).
    double w = -std::log((1.0 - x) * (1.0 + x));
    double p;
    if (w < 5.0) {
        w -= 2.5;
        p = 2.81022636e-08;
        p = 3.43273939e-07 + p * w;
        p = -3.5233877e-06 + p * w;
        p = -4.39150654e-06 + p * w;
        p = 0.00021858087 + p * w;
        p = -0.00125372503 + p * w;
        p = -0.00417768164 + p * w;
        p = 0.246640727 + p * w;
        p = 1.50140941 + p * w;
    } else {
        w = std::sqrt(w) - 3.0;
        p = -0.000200214257;
        p = 0.000100950558 + p * w;
        p = 0.00134934322 + p * w;
        p = -0.00367342844 + p * w;
        p = 0.00573950773 + p * w;
        p = -0.0076224613 + p * w;
        p = 0.00943887047 + p * w;
        p = 1.00167406 + p * w;
        p = 2.83297682 + p * w;
    }
    double y = p * x;
    const double k = 2.0 / std::sqrt(std::numbers::pi);
    for (int i = 0; i < 2; ++i) {
        const double err = std::erf(y) - x;
        y -= err / (k * std::exp(-y * y));
    }
    return y;
}

double xi(double alpha, double snr_db, int n)
{
    if (!(alpha > 0.0 && alpha < 1.0))
        throw InvalidInput("confidence level must lie in (0, 1)");
    if (n < 1)
        throw InvalidInput("antenna count must be >= 1");
    return std::numbers::sqrt2 * erfinv(alpha) * std::pow(10.0, -snr_db / 20.0) / std::sqrt(static_cast<double>(n));
}

double gain(int n)
{
    if (n < 1)
        throw InvalidInput("antenna count must be >= 1");
    return 1.0 - std::sqrt(1.0 / static_cast<double>(n));
}

int min_antennas(double p0)
{
    if (!(p0 >= 0.0 && p0 < 1.0))
        throw InvalidInput("gain threshold must lie in [0, 1)");
    const double bound = 1.0 / ((1.0 - p0) * (1.0 - p0));
    auto n = static_cast<int>(std::floor(bound));
    // Guard against rounding in the bound: step to the first n that really clears p0.
    while (n > 1 && gain(n - 1) > p0)
        --n;
    while (gain(n) <= p0)
        ++n;
    return n;
}

Scheme parse_scheme(std::string_view name)
{
    if (name == "ORS")
        return Scheme::ors;
    if (name == "UWS")
        return Scheme::uws;
    if (name == "MIWS")
        return Scheme::miws;
    if (name == "DFS")
        return Scheme::dfs;
    if (name == "GDFWS")
        return Scheme::gdfws;
    throw ConfigError("unknown scheme '" + std::string(name) + "' (expected ORS, UWS, MIWS, DFS or GDFWS)");
}

std::string_view to_string(Scheme scheme)
{
    switch (scheme) {
    case Scheme::ors:
        return "ORS";
    case Scheme::uws:
        return "UWS";
    case Scheme::miws:
        return "MIWS";
    case Scheme::dfs:
        return "DFS";
    case Scheme::gdfws:
        return "GDFWS";
    }
    return "?";
}

SchemeChoice select_scheme(int n, double snr_db)
{
    if (n < 1)
        throw InvalidInput("antenna count must be >= 1");
    if (n <= 4)
        return {Scheme::miws, "n=" + std::to_string(n) + " <= 4"};
    if (n > 128 && snr_db >= 10.0)
        return {Scheme::gdfws, "n=" + std::to_string(n) + " > 128 and snr >= 10 dB"};
    if (n > 128)
        return {Scheme::dfs, "n=" + std::to_string(n) + " > 128 but snr < 10 dB"};
    return {Scheme::dfs, "4 < n=" + std::to_string(n) + " <= 128"};
}

std::vector<XiRow> xi_table(double alpha, double snr_db, std::span<const int> n_list)
{
    std::vector<XiRow> rows;
    for (std::size_t i = 0; i < n_list.size(); ++i) {
        if (i > 0 && n_list[i] <= n_list[i - 1])
            throw InvalidInput("antenna counts must be strictly ascending");
        XiRow r;
        r.n = n_list[i];
        r.xi = xi(alpha, snr_db, r.n);
        if (i > 0)
            r.delta = rows.back().xi - r.xi;
        rows.push_back(r);
    }
    return rows;
}

double predicted_residual_std(double snr_db, int n)
{
    if (n < 1)
        throw InvalidInput("antenna count must be >= 1");
    if (std::isinf(snr_db) && snr_db > 0)
        return 0.0;
    return std::pow(10.0, -snr_db / 20.0) / std::sqrt(static_cast<double>(n));
}

std::string format_xi_table(double alpha, double snr_db, std::span<const XiRow> rows)
{
    std::string out;
    char buf[64];
    std::snprintf(buf, sizeof buf, "alpha = %g, SNR = %g dB\n", alpha, snr_db);
    out += buf;
    auto line = [&](const char* head, auto cell) {
        std::snprintf(buf, sizeof buf, "%-8s", head);
        out += buf;
        for (const auto& r : rows)
            out += cell(r);
        out += '\n';
    };
    line("N", [&](const XiRow& r) {
        std::snprintf(buf, sizeof buf, "%9d", r.n);
        return std::string(buf);
    });
    line("xi", [&](const XiRow& r) {
        std::snprintf(buf, sizeof buf, "%9.4f", r.xi);
        return std::string(buf);
    });
    line("dxi", [&](const XiRow& r) {
        if (!r.delta)
            return std::string(9, ' ');
        std::snprintf(buf, sizeof buf, "%9.4f", *r.delta);
        return std::string(buf);
    });
    line("Scheme", [&](const XiRow& r) {
        std::snprintf(buf, sizeof buf, "%9s", std::string(to_string(select_scheme(r.n, snr_db).scheme)).c_str());
        return std::string(buf);
    });
    return out;
}

} // namespace rffid
