#include "rffid/features.hpp"

#include "rffid/error.hpp"

#include <cmath>
#include <string>

namespace rffid {

namespace {

std::vector<std::size_t> interior_extrema(const std::vector<double>& x)
{
    std::vector<std::size_t> out;
    for (std::size_t i = 1; i + 1 < x.size(); ++i) {
        const bool peak = x[i] > x[i - 1] && x[i] > x[i + 1];
        const bool trough = x[i] < x[i - 1] && x[i] < x[i + 1];
        if (peak || trough)
            out.push_back(i);
    }
    return out;
}

} // namespace

ItdDecomposition itd_decompose(std::span<const double> x, int levels, double alpha)
{
    if (x.size() < 8)
        throw InvalidInput("ITD needs at least 8 samples");
    if (levels < 1)
        throw InvalidInput("ITD needs at least one level");

    const std::size_t n = x.size();
    ItdDecomposition out;
    std::vector<double> cur(x.begin(), x.end());

    for (int level = 0; level < levels; ++level) {
        const auto ext = interior_extrema(cur);
        if (ext.size() < 3) {
            out.rotations.emplace_back(n, 0.0);
            continue;
        }
        // Knot positions: endpoints plus the extrema.
        std::vector<std::size_t> tau;
        tau.reserve(ext.size() + 2);
        tau.push_back(0);
        tau.insert(tau.end(), ext.begin(), ext.end());
        tau.push_back(n - 1);

        std::vector<double> knot(tau.size());
        knot.front() = cur.front();
        knot.back() = cur.back();
        for (std::size_t k = 1; k + 1 < tau.size(); ++k) {
            const double t0 = static_cast<double>(tau[k - 1]);
            const double t1 = static_cast<double>(tau[k]);
            const double t2 = static_cast<double>(tau[k + 1]);
            const double x0 = cur[tau[k - 1]];
            const double x2 = cur[tau[k + 1]];
            knot[k] = alpha * (x0 + (t1 - t0) / (t2 - t0) * (x2 - x0)) + (1.0 - alpha) * cur[tau[k]];
        }

        std::vector<double> base(n);
        for (std::size_t k = 0; k + 1 < tau.size(); ++k) {
            const std::size_t a = tau[k];
            const std::size_t b = tau[k + 1];
            const double span = static_cast<double>(b - a);
            for (std::size_t i = a; i <= b; ++i)
                base[i] = knot[k] + (knot[k + 1] - knot[k]) * static_cast<double>(i - a) / span;
        }

        std::vector<double> rot(n);
        for (std::size_t i = 0; i < n; ++i)
            rot[i] = cur[i] - base[i];
        out.rotations.push_back(std::move(rot));
        cur = std::move(base);
    }
    out.baseline = std::move(cur);
    return out;
}

FeatureMethod parse_feature_method(std::string_view name)
{
    if (name == "itd")
        return FeatureMethod::itd;
    if (name == "lms")
        return FeatureMethod::lms;
    throw ConfigError("unknown feature method '" + std::string(name) + "' (expected itd or lms)");
}

std::string_view to_string(FeatureMethod method)
{
    return method == FeatureMethod::itd ? "itd" : "lms";
}

FeatureVector itd_features(std::span<const Complex> x, int levels)
{
    FeatureVector fv;
    fv.method = FeatureMethod::itd;
    fv.values.reserve(static_cast<std::size_t>(4 * (levels + 1)));
    std::vector<double> part(x.size());
    for (int pass = 0; pass < 2; ++pass) {
        for (std::size_t i = 0; i < x.size(); ++i)
            part[i] = pass == 0 ? x[i].real() : x[i].imag();
        const auto dec = itd_decompose(part, levels);
        auto push = [&](const std::vector<double>& s) {
            const auto m = moments(s);
            fv.values.push_back(m.skewness);
            fv.values.push_back(m.kurtosis);
        };
        for (const auto& r : dec.rotations)
            push(r);
        push(dec.baseline);
    }
    return fv;
}

int best_lag(std::span<const Complex> y, std::span<const Complex> reference, std::size_t region, int max_lag)
{
    const auto rlen = static_cast<std::ptrdiff_t>(reference.size());
    int best = 0;
    double best_mag = -1.0;
    // Search outward from zero so ties keep the smallest shift.
    for (int step = 0; step <= 2 * max_lag; ++step) {
        const int d = (step % 2 == 0) ? step / 2 : -(step + 1) / 2;
        Complex acc{};
        for (std::size_t n = 0; n < region; ++n) {
            const std::ptrdiff_t m = static_cast<std::ptrdiff_t>(n) - d;
            if (m >= 0 && m < rlen)
                acc += y[n] * std::conj(reference[static_cast<std::size_t>(m)]);
        }
        const double mag = std::norm(acc);
        if (mag > best_mag) {
            best_mag = mag;
            best = d;
        }
    }
    return best;
}

LmsResult lms_identify(std::span<const Complex> y, std::span<const Complex> reference, const LmsConfig& config)
{
    if (config.order < 1)
        throw InvalidInput("LMS order must be >= 1");
    if (!(config.mu > 0.0))
        throw InvalidInput("LMS step size must be > 0");
    if (config.max_epochs < 1)
        throw InvalidInput("LMS needs at least one epoch");
    const std::size_t region = config.region ? config.region : std::min(y.size(), reference.size());
    if (region == 0 || region > y.size() || region > reference.size())
        throw InvalidInput("LMS region exceeds the input length");

    const auto p = static_cast<std::size_t>(config.order);
    const auto half = static_cast<std::ptrdiff_t>((p - 1) / 2);
    const auto rlen = static_cast<std::ptrdiff_t>(reference.size());

    LmsResult res;
    res.lag = config.align ? best_lag(y, reference, region, config.max_lag) : 0;

    // Tap inputs for every n of the region, built once, split into real and
    // imaginary planes so the tap loops vectorize.
    std::vector<double> ur(region * p), ui(region * p);
    for (std::size_t n = 0; n < region; ++n)
        for (std::size_t k = 0; k < p; ++k) {
            const std::ptrdiff_t m =
                static_cast<std::ptrdiff_t>(n) - res.lag + static_cast<std::ptrdiff_t>(k) - half;
            const Complex v = (m >= 0 && m < rlen) ? reference[static_cast<std::size_t>(m)] : Complex{};
            ur[n * p + k] = v.real();
            ui[n * p + k] = v.imag();
        }

    std::vector<double> wr(p, 0.0), wi(p, 0.0), pr(p), pi(p);
    for (int epoch = 1; epoch <= config.max_epochs; ++epoch) {
        pr = wr;
        pi = wi;
        for (std::size_t n = 0; n < region; ++n) {
            const double* a = &ur[n * p];
            const double* b = &ui[n * p];
            double er = 0.0, ei = 0.0;
            for (std::size_t k = 0; k < p; ++k) {
                er += wr[k] * a[k] - wi[k] * b[k];
                ei += wr[k] * b[k] + wi[k] * a[k];
            }
            // e = mu (y - w^T u); w += e conj(u)
            er = config.mu * (y[n].real() - er);
            ei = config.mu * (y[n].imag() - ei);
            for (std::size_t k = 0; k < p; ++k) {
                wr[k] += er * a[k] + ei * b[k];
                wi[k] += ei * a[k] - er * b[k];
            }
        }
        double change = 0.0;
        for (std::size_t k = 0; k < p; ++k)
            change += (wr[k] - pr[k]) * (wr[k] - pr[k]) + (wi[k] - pi[k]) * (wi[k] - pi[k]);
        res.epochs = epoch;
        if (!std::isfinite(change))
            break;
        if (std::sqrt(change) < config.tol) {
            res.converged = true;
            break;
        }
    }
    res.w.resize(p);
    for (std::size_t k = 0; k < p; ++k)
        res.w[k] = Complex{wr[k], wi[k]};
    return res;
}

FeatureVector lms_features(std::span<const Complex> y, std::span<const Complex> reference, const LmsConfig& config)
{
    const auto res = lms_identify(y, reference, config);
    FeatureVector fv;
    fv.method = FeatureMethod::lms;
    fv.converged = res.converged;
    fv.values.reserve(2 * res.w.size());
    for (const auto& w : res.w)
        fv.values.push_back(w.real());
    for (const auto& w : res.w)
        fv.values.push_back(w.imag());
    return fv;
}

ComplexSequence ideal_pilot_reference(const FrameLayout& layout, const FilterSpec& filter)
{
    if (layout.oversampling != filter.oversampling)
        throw InvalidInput("frame and filter oversampling differ");
    const Frame frame = pilot_only_frame(layout);
    auto ref = shape_symbols(frame, ideal_shaping_filter(filter));
    const double scale = std::sqrt(static_cast<double>(filter.oversampling));
    for (auto& v : ref)
        v *= scale;
    return ref;
}

std::size_t pilot_region_length(const FrameLayout& layout, const FilterSpec& filter)
{
    const int symbols = layout.pilot_count - filter.span / 2 - 1;
    if (symbols < 1)
        throw InvalidInput("too few pilots for the filter span");
    return static_cast<std::size_t>(symbols) * static_cast<std::size_t>(layout.oversampling);
}

FeatureExtractor::FeatureExtractor(const FeatureConfig& config) : config_(config)
{
    if (config_.itd_span == ItdSpan::pilot)
        itd_length_ = pilot_region_length(config_.layout, config_.filter);
    if (config_.method == FeatureMethod::lms) {
        reference_ = ideal_pilot_reference(config_.layout, config_.filter);
        if (config_.lms.region == 0)
            config_.lms.region = pilot_region_length(config_.layout, config_.filter);
    }
}

FeatureVector FeatureExtractor::operator()(std::span<const Complex> x) const
{
    if (config_.method == FeatureMethod::itd) {
        if (itd_length_ > 0 && x.size() > itd_length_)
            x = x.first(itd_length_);
        return itd_features(x, config_.itd_levels);
    }
    return lms_features(x, reference_, config_.lms);
}

std::size_t FeatureExtractor::dim() const
{
    if (config_.method == FeatureMethod::itd)
        return static_cast<std::size_t>(4 * (config_.itd_levels + 1));
    return static_cast<std::size_t>(2 * config_.lms.order);
}

} // namespace rffid
