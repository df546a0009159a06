#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace rffid {

/// Inverse error function: Giles' single-precision rational approximation
/// refined by two Newton steps on std::erf.
double erfinv(double x);

/// Absolute accuracy bound: sqrt(2) erfinv(alpha) 10^(-snr/20) / sqrt(n).
double xi(double alpha, double snr_db, int n);

/// p = 1 - sqrt(1/n).
double gain(int n);

/// Smallest n with gain(n) > p0.
int min_antennas(double p0);

enum class Scheme { ors, uws, miws, dfs, gdfws };

Scheme parse_scheme(std::string_view name);
std::string_view to_string(Scheme scheme);

struct SchemeChoice {
    Scheme scheme = Scheme::miws;
    std::string reason;
};

SchemeChoice select_scheme(int n, double snr_db);

struct XiRow {
    int n = 0;
    double xi = 0.0;
    std::optional<double> delta;  // xi(previous n) - xi(n)
};

std::vector<XiRow> xi_table(double alpha, double snr_db, std::span<const int> n_list);

/// Standard deviation of the column-average residual: 10^(-snr/20) / sqrt(n).
double predicted_residual_std(double snr_db, int n);

/// Aligned text table: N, xi, delta-xi and recommended scheme rows.
std::string format_xi_table(double alpha, double snr_db, std::span<const XiRow> rows);

} // namespace rffid
