#include "rffid/schemes.hpp"

#include "rffid/error.hpp"
#include "rffid/features.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace rffid {

double delta_mi(double var_y, double var_w, double var_x2, double var_h)
{
    if (!(var_y > 0.0) || !(var_w > 0.0) || !(var_x2 > 0.0) || !(var_h > 0.0))
        throw InvalidInput("delta_mi needs positive variances");
    const double raw = 0.5 * std::log(var_y / (var_w + var_x2 * var_h));
    return std::max(raw, delta_mi_floor);
}

MiwsWeights miws_weights(std::span<const double> delta)
{
    if (delta.empty())
        throw InvalidInput("miws_weights needs at least one delta");
    MiwsWeights w;
    w.delta.assign(delta.begin(), delta.end());
    w.omega.resize(delta.size());
    double total = 0.0;
    for (std::size_t i = 0; i < delta.size(); ++i) {
        if (!(delta[i] >= delta_mi_floor))
            throw InvalidInput("delta below the floor");
        w.omega[i] = 1.0 / delta[i];
        total += w.omega[i];
    }
    for (auto& o : w.omega)
        o /= total;
    return w;
}

MiMode parse_mi_mode(std::string_view name)
{
    if (name == "oracle")
        return MiMode::oracle;
    if (name == "pilot")
        return MiMode::pilot;
    throw ConfigError("unknown mi_mode '" + std::string(name) + "' (expected oracle or pilot)");
}

RatioMode parse_ratio_mode(std::string_view name)
{
    if (name == "mean")
        return RatioMode::mean;
    if (name == "xcorr")
        return RatioMode::xcorr;
    throw ConfigError("unknown ratio_mode '" + std::string(name) + "' (expected mean or xcorr)");
}

std::string_view to_string(MiMode mode)
{
    return mode == MiMode::oracle ? "oracle" : "pilot";
}

std::string_view to_string(RatioMode mode)
{
    return mode == RatioMode::mean ? "mean" : "xcorr";
}

std::vector<AntennaVariances> estimate_variances(const AntennaCapture& capture, MiMode mode, const PilotInfo* pilot)
{
    capture.validate();
    const std::size_t n = capture.n_antennas();
    const std::size_t len = capture.length();
    std::vector<AntennaVariances> out(n);

    if (mode == MiMode::oracle) {
        if (!capture.truth)
            throw ConfigError("oracle mi_mode needs ground truth in the capture");
        const auto& t = *capture.truth;
        if (t.h.size() != n || t.x_hat.size() != len)
            throw InvalidInput("capture truth does not match its samples");
        const double var_x2 = std::max(mean_power(t.x_hat), variance_floor);
        for (std::size_t i = 0; i < n; ++i) {
            double err = 0.0;
            for (std::size_t k = 0; k < len; ++k)
                err += std::norm(capture.y[i][k] - t.h[i] * t.x_hat[k]);
            auto& v = out[i];
            v.var_x2 = var_x2;
            v.var_h = std::max(std::norm(t.h[i]), variance_floor);
            v.var_w = std::max(t.noise_variance, variance_floor);
            v.var_y = v.var_x2 * v.var_h + err / static_cast<double>(len);
        }
        return out;
    }

    if (!pilot || pilot->waveform.empty() || pilot->region == 0)
        throw ConfigError("pilot mi_mode needs the pilot waveform");
    const std::size_t region = std::min({pilot->region, len, pilot->waveform.size()});
    const auto rlen = static_cast<std::ptrdiff_t>(pilot->waveform.size());
    for (std::size_t i = 0; i < n; ++i) {
        const auto& y = capture.y[i];
        const int lag = best_lag(y, pilot->waveform, region, pilot->max_lag);
        Complex corr{};
        double pe = 0.0;
        for (std::size_t k = 0; k < region; ++k) {
            const std::ptrdiff_t m = static_cast<std::ptrdiff_t>(k) - lag;
            if (m < 0 || m >= rlen)
                continue;
            const Complex p = pilot->waveform[static_cast<std::size_t>(m)];
            corr += y[k] * std::conj(p);
            pe += std::norm(p);
        }
        auto& v = out[i];
        v.var_y = std::max(moments(y).variance, variance_floor);
        const double signal = pe > 0.0 ? std::norm(corr) / (pe * pe) * pe / static_cast<double>(region) : 0.0;
        v.var_x2 = 1.0;
        v.var_h = std::max(signal, variance_floor);
        v.var_w = std::max(v.var_y - signal, variance_floor);
    }
    return out;
}

std::vector<double> antenna_delta_mi(const AntennaCapture& capture, MiMode mode, const PilotInfo* pilot)
{
    const auto vars = estimate_variances(capture, mode, pilot);
    std::vector<double> d;
    d.reserve(vars.size());
    for (const auto& v : vars)
        d.push_back(delta_mi(v.var_y, v.var_w, v.var_x2, v.var_h));
    return d;
}

VoteOutcome weighted_vote(std::span<const int> labels, std::span<const double> weights, int classes)
{
    if (labels.size() != weights.size())
        throw InvalidInput("vote labels and weights differ in length");
    if (labels.empty())
        throw InvalidInput("vote needs at least one unit");
    int m = classes;
    for (int l : labels) {
        if (l < 0)
            throw InvalidInput("negative vote label");
        m = std::max(m, l + 1);
    }
    VoteOutcome out;
    out.tally.assign(static_cast<std::size_t>(m), 0.0);
    for (std::size_t i = 0; i < labels.size(); ++i) {
        out.tally[static_cast<std::size_t>(labels[i])] += weights[i];
        out.contributors.emplace_back(labels[i], weights[i]);
    }
    out.label = static_cast<int>(argmax(out.tally));
    return out;
}

namespace {

constexpr double degenerate = 1e-12;

void check_rows(std::span<const ComplexSequence> rows)
{
    if (rows.size() < 2)
        throw InvalidInput("DFS needs at least two antennas");
    if (rows.front().size() < 2)
        throw InvalidInput("DFS needs at least two samples per row");
    for (const auto& r : rows)
        if (r.size() != rows.front().size())
            throw InvalidInput("capture rows differ in length");
}

// Final step shared by both ratio modes: average the row-normalized Xi rows.
DfsRecovery finish(const std::vector<ComplexSequence>& xi, std::vector<Complex> ratios, RatioMode mode)
{
    const std::size_t len = xi.front().size();
    DfsRecovery out;
    out.mode_used = mode;
    out.phi_ratios = std::move(ratios);
    out.excluded.assign(xi.size(), false);
    out.x_tilde.assign(len, Complex{});
    std::size_t used = 0;
    for (std::size_t l = 0; l < xi.size(); ++l) {
        const Complex first = xi[l][0];
        if (std::abs(first) < degenerate) {
            out.excluded[l] = true;
            continue;
        }
        const Complex inv = 1.0 / first;
        for (std::size_t k = 0; k < len; ++k)
            out.x_tilde[k] += xi[l][k] * inv;
        ++used;
    }
    if (used == 0)
        throw DegenerateRow("every DFS row has a vanishing first sample");
    const double scale = 1.0 / static_cast<double>(used);
    for (auto& v : out.x_tilde)
        v *= scale;
    out.x_tilde[0] = Complex{1.0, 0.0};
    return out;
}

} // namespace

DfsRecovery dfs_recover(std::span<const ComplexSequence> rows, RatioMode mode)
{
    check_rows(rows);
    const std::size_t n = rows.size();
    const std::size_t len = rows.front().size();
    const double inv_n = 1.0 / static_cast<double>(n);

    if (mode == RatioMode::mean) {
        std::vector<Complex> m(n);
        for (std::size_t i = 0; i < n; ++i) {
            Complex acc{};
            for (const auto& v : rows[i])
                acc += v;
            m[i] = acc / static_cast<double>(len);
            if (std::abs(m[i]) < degenerate)
                throw DegenerateRow("row " + std::to_string(i) + " has a vanishing mean");
        }
        // With r_lj = m_l / m_j the column average factorizes:
        // Xi_l = m_l * (1/N) sum_j Y_j / m_j.
        ComplexSequence s(len);
        for (std::size_t j = 0; j < n; ++j) {
            const Complex inv = 1.0 / m[j];
            for (std::size_t k = 0; k < len; ++k)
                s[k] += rows[j][k] * inv;
        }
        for (auto& v : s)
            v *= inv_n;
        std::vector<ComplexSequence> xi(n, ComplexSequence(len));
        std::vector<Complex> ratios(n);
        for (std::size_t l = 0; l < n; ++l) {
            ratios[l] = m[l] / m[0];
            for (std::size_t k = 0; k < len; ++k)
                xi[l][k] = m[l] * s[k];
        }
        return finish(xi, std::move(ratios), mode);
    }

    std::vector<double> energy(n);
    for (std::size_t j = 0; j < n; ++j) {
        double e = 0.0;
        for (const auto& v : rows[j])
            e += std::norm(v);
        if (e < degenerate)
            throw DegenerateRow("row " + std::to_string(j) + " has no energy");
        energy[j] = e;
    }
    std::vector<ComplexSequence> xi(n, ComplexSequence(len));
    std::vector<Complex> ratios(n);
    for (std::size_t l = 0; l < n; ++l) {
        for (std::size_t j = 0; j < n; ++j) {
            Complex r{};
            if (l == j) {
                r = 1.0;
            } else {
                for (std::size_t k = 0; k < len; ++k)
                    r += rows[l][k] * std::conj(rows[j][k]);
                r /= energy[j];
            }
            if (j == 0)
                ratios[l] = r;
            for (std::size_t k = 0; k < len; ++k)
                xi[l][k] += r * rows[j][k];
        }
        for (auto& v : xi[l])
            v *= inv_n;
    }
    return finish(xi, std::move(ratios), mode);
}

DfsRecovery dfs_recover(const AntennaCapture& capture, RatioMode mode)
{
    return dfs_recover(std::span<const ComplexSequence>(capture.y), mode);
}

DfsRecovery dfs_recover_robust(std::span<const ComplexSequence> rows, RatioMode mode)
{
    if (mode == RatioMode::mean) {
        try {
            return dfs_recover(rows, RatioMode::mean);
        } catch (const DegenerateRow&) {
        }
    }
    return dfs_recover(rows, RatioMode::xcorr);
}

std::vector<std::pair<std::size_t, std::size_t>> partition_groups(std::size_t n, std::size_t group_size)
{
    if (group_size < 1)
        throw ConfigError("group_size must be >= 1");
    if (group_size > n)
        throw ConfigError("group_size " + std::to_string(group_size) + " exceeds the antenna count " +
                          std::to_string(n));
    const std::size_t g = (n + group_size - 1) / group_size;
    const std::size_t base = n / g;
    const std::size_t extra = n % g;
    std::vector<std::pair<std::size_t, std::size_t>> out;
    std::size_t begin = 0;
    for (std::size_t i = 0; i < g; ++i) {
        const std::size_t size = base + (i < extra ? 1 : 0);
        out.emplace_back(begin, begin + size);
        begin += size;
    }
    return out;
}

namespace {

int classify(const SchemeContext& ctx, const TrainedModel& model, std::span<const Complex> x)
{
    return model.predict(ctx.features(x)).label;
}

const TrainedModel& model_for(std::span<const TrainedModel> models, std::size_t i)
{
    if (models.empty())
        throw InvalidInput("no trained model supplied");
    return models.size() == 1 ? models.front() : models[i];
}

std::vector<int> per_antenna_labels(const AntennaCapture& capture, const SchemeContext& ctx,
                                    std::span<const TrainedModel> models)
{
    if (models.size() != 1 && models.size() != capture.n_antennas())
        throw InvalidInput("need one model per antenna or a single shared model");
    std::vector<int> labels(capture.n_antennas());
    for (std::size_t i = 0; i < labels.size(); ++i)
        labels[i] = classify(ctx, model_for(models, i), capture.y[i]);
    return labels;
}

} // namespace

VoteOutcome ors_identify(const AntennaCapture& capture, std::size_t antenna, const SchemeContext& ctx,
                         const TrainedModel& model)
{
    if (antenna >= capture.n_antennas())
        throw InvalidInput("antenna index out of range");
    const int label = classify(ctx, model, capture.y[antenna]);
    const int one[] = {label};
    const double w[] = {1.0};
    return weighted_vote(one, w, model.classes);
}

VoteOutcome uws_identify(const AntennaCapture& capture, const SchemeContext& ctx,
                         std::span<const TrainedModel> models)
{
    const auto labels = per_antenna_labels(capture, ctx, models);
    const std::vector<double> w(labels.size(), 1.0 / static_cast<double>(labels.size()));
    return weighted_vote(labels, w, models.front().classes);
}

VoteOutcome miws_identify(const AntennaCapture& capture, const SchemeContext& ctx,
                          std::span<const TrainedModel> models)
{
    const auto labels = per_antenna_labels(capture, ctx, models);
    const auto weights = miws_weights(antenna_delta_mi(capture, ctx.mi_mode, ctx.pilot));
    return weighted_vote(labels, weights.omega, models.front().classes);
}

VoteOutcome dfs_identify(const AntennaCapture& capture, const SchemeContext& ctx, const TrainedModel& model)
{
    const auto rec = dfs_recover_robust(capture.y, ctx.ratio_mode);
    const int one[] = {classify(ctx, model, rec.x_tilde)};
    const double w[] = {1.0};
    return weighted_vote(one, w, model.classes);
}

GroupPlan gdfws_plan(const AntennaCapture& capture, std::size_t group_size, const SchemeContext& ctx)
{
    if (group_size < 2)
        throw ConfigError("GDFWS group_size must be >= 2");
    GroupPlan plan;
    plan.groups = partition_groups(capture.n_antennas(), group_size);
    const auto delta = antenna_delta_mi(capture, ctx.mi_mode, ctx.pilot);
    std::vector<double> group_delta;
    for (const auto& [b, e] : plan.groups) {
        const std::span<const ComplexSequence> rows(capture.y.data() + b, e - b);
        if (rows.size() >= 2) {
            plan.x_tilde.push_back(dfs_recover_robust(rows, ctx.ratio_mode).x_tilde);
        } else {
            // A lone antenna is its own recovery, normalized the same way.
            ComplexSequence x = rows.front();
            const Complex first = x.front();
            if (std::abs(first) > 0.0)
                for (auto& v : x)
                    v /= first;
            plan.x_tilde.push_back(std::move(x));
        }
        const double mean = std::accumulate(delta.begin() + static_cast<std::ptrdiff_t>(b),
                                            delta.begin() + static_cast<std::ptrdiff_t>(e), 0.0) /
                            static_cast<double>(e - b);
        group_delta.push_back(mean);
    }
    plan.weights = miws_weights(group_delta);
    return plan;
}

VoteOutcome gdfws_identify(const AntennaCapture& capture, std::size_t group_size, const SchemeContext& ctx,
                           const TrainedModel& model)
{
    const auto plan = gdfws_plan(capture, group_size, ctx);
    std::vector<int> labels;
    labels.reserve(plan.x_tilde.size());
    for (const auto& x : plan.x_tilde)
        labels.push_back(classify(ctx, model, x));
    return weighted_vote(labels, plan.weights.omega, model.classes);
}

} // namespace rffid
