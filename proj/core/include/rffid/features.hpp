#pragma once

#include "rffid/emitter.hpp"
#include "rffid/signal.hpp"

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace rffid {

struct ItdDecomposition {
    std::vector<std::vector<double>> rotations;  // H_1..H_K
    std::vector<double> baseline;                // L_K
};

/// Intrinsic time-scale decomposition with piecewise-linear baselines.
/// Levels after the signal runs out of interior extrema are zero rotations.
ItdDecomposition itd_decompose(std::span<const double> x, int levels, double alpha = 0.5);

enum class FeatureMethod { itd, lms };

FeatureMethod parse_feature_method(std::string_view name);
std::string_view to_string(FeatureMethod method);

struct FeatureVector {
    std::vector<double> values;
    FeatureMethod method = FeatureMethod::itd;
    bool converged = true;  // LMS only

    std::size_t dim() const { return values.size(); }
};

/// [skewness, kurtosis] of every rotation and the baseline, real part first.
FeatureVector itd_features(std::span<const Complex> x, int levels = 4);

struct LmsConfig {
    int order = 11;
    double mu = 0.01;
    int max_epochs = 100;
    double tol = 1e-6;
    bool align = true;         // center the tap window on the best integer lag
    int max_lag = 40;          // lag search range, samples
    std::size_t region = 0;    // samples adapted over; 0 means the shorter input
};

struct LmsResult {
    ComplexSequence w;
    int epochs = 0;
    bool converged = false;
    int lag = 0;
};

/// Complex LMS identification of y(n) ~ sum_k w_k r(n - lag + k - (P-1)/2),
/// update w += mu e(n) conj(u(n)), repeated over the region until the
/// per-epoch weight change drops below tol.
LmsResult lms_identify(std::span<const Complex> y, std::span<const Complex> reference, const LmsConfig& config = {});

/// Real then imaginary parts of the converged taps (dim 2P).
FeatureVector lms_features(std::span<const Complex> y, std::span<const Complex> reference,
                           const LmsConfig& config = {});

/// Lag d maximizing |sum_n y(n) conj(r(n - d))| over n < region, |d| <= max_lag.
int best_lag(std::span<const Complex> y, std::span<const Complex> reference, std::size_t region, int max_lag);

/// Published pilots through the undistorted shaping filter, data slots empty,
/// scaled by sqrt(oversampling) so the pilot section has roughly unit power.
ComplexSequence ideal_pilot_reference(const FrameLayout& layout = {}, const FilterSpec& filter = {});

/// Leading samples that carry pilot energy only (no data-symbol tails).
std::size_t pilot_region_length(const FrameLayout& layout = {}, const FilterSpec& filter = {});

enum class ItdSpan {
    pilot,  // leading pilot-only samples; the fixed pilots keep data randomness out of the moments
    frame,  // the whole sequence
};

struct FeatureConfig {
    FeatureMethod method = FeatureMethod::lms;
    int itd_levels = 4;
    ItdSpan itd_span = ItdSpan::pilot;
    LmsConfig lms;
    FrameLayout layout;
    FilterSpec filter;
};

/// Feature function bound to a configuration (caches the LMS reference).
class FeatureExtractor {
public:
    explicit FeatureExtractor(const FeatureConfig& config = {});

    FeatureVector operator()(std::span<const Complex> x) const;
    std::size_t dim() const;
    const FeatureConfig& config() const { return config_; }
    const ComplexSequence& reference() const { return reference_; }

private:
    FeatureConfig config_;
    ComplexSequence reference_;
    std::size_t itd_length_ = 0;
};

} // namespace rffid
