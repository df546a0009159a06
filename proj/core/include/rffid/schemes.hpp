#pragma once

#include "rffid/classifier.hpp"
#include "rffid/frontend.hpp"

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace rffid {

inline constexpr double delta_mi_floor = 1e-9;

/// Mutual-information deficit 0.5 ln(var_y / (var_w + var_x2 var_h)), floored.
double delta_mi(double var_y, double var_w, double var_x2, double var_h);

struct MiwsWeights {
    std::vector<double> delta;
    std::vector<double> omega;
};

/// omega_i proportional to 1 / delta_i, summing to one.
MiwsWeights miws_weights(std::span<const double> delta);

enum class MiMode { oracle, pilot };
enum class RatioMode { mean, xcorr };

MiMode parse_mi_mode(std::string_view name);
RatioMode parse_ratio_mode(std::string_view name);
std::string_view to_string(MiMode mode);
std::string_view to_string(RatioMode mode);

struct AntennaVariances {
    double var_y = 0.0;
    double var_w = 0.0;
    double var_x2 = 0.0;
    double var_h = 0.0;
};

/// Known pilot waveform and the leading sample count it covers.
struct PilotInfo {
    ComplexSequence waveform;
    std::size_t region = 0;
    int max_lag = 40;
};

inline constexpr double variance_floor = 1e-12;

/// Oracle: var_x2 and var_h from truth, var_w the configured noise level, and
/// var_y = var_x2 var_h + mean |y - h x_hat|^2 (the energy the receiver adds).
/// Pilot: var_y is the row variance, var_x2 var_h comes from the matched
/// correlation with the pilot waveform, var_w is the remainder.
std::vector<AntennaVariances> estimate_variances(const AntennaCapture& capture, MiMode mode,
                                                 const PilotInfo* pilot = nullptr);

std::vector<double> antenna_delta_mi(const AntennaCapture& capture, MiMode mode, const PilotInfo* pilot = nullptr);

struct VoteOutcome {
    int label = 0;
    std::vector<double> tally;
    std::vector<std::pair<int, double>> contributors;
};

VoteOutcome weighted_vote(std::span<const int> labels, std::span<const double> weights, int classes = 0);

struct DfsRecovery {
    ComplexSequence x_tilde;
    std::vector<Complex> phi_ratios;   // estimated phi_l / phi_0
    std::vector<bool> excluded;        // rows left out of the final average
    RatioMode mode_used = RatioMode::mean;
};

/// Recovers the antenna-independent waveform, normalized to x_tilde[0] = 1.
/// Mean mode throws DegenerateRow on a vanishing row mean.
DfsRecovery dfs_recover(const AntennaCapture& capture, RatioMode mode = RatioMode::mean);
DfsRecovery dfs_recover(std::span<const ComplexSequence> rows, RatioMode mode = RatioMode::mean);

/// Mean mode with automatic fallback to cross-correlation ratios.
DfsRecovery dfs_recover_robust(std::span<const ComplexSequence> rows, RatioMode mode);

/// Contiguous groups, sizes differing by at most one, larger groups first.
std::vector<std::pair<std::size_t, std::size_t>> partition_groups(std::size_t n, std::size_t group_size);

using FeatureFn = std::function<std::vector<double>(std::span<const Complex>)>;

struct SchemeContext {
    FeatureFn features;
    MiMode mi_mode = MiMode::oracle;
    RatioMode ratio_mode = RatioMode::mean;
    const PilotInfo* pilot = nullptr;
};

/// Classify one antenna's raw row.
VoteOutcome ors_identify(const AntennaCapture& capture, std::size_t antenna, const SchemeContext& ctx,
                         const TrainedModel& model);

/// `models` holds one model per antenna, or a single shared one.
VoteOutcome uws_identify(const AntennaCapture& capture, const SchemeContext& ctx,
                         std::span<const TrainedModel> models);
VoteOutcome miws_identify(const AntennaCapture& capture, const SchemeContext& ctx,
                          std::span<const TrainedModel> models);

VoteOutcome dfs_identify(const AntennaCapture& capture, const SchemeContext& ctx, const TrainedModel& model);

struct GroupPlan {
    std::vector<std::pair<std::size_t, std::size_t>> groups;  // [begin, end)
    std::vector<ComplexSequence> x_tilde;
    MiwsWeights weights;
};

/// DFS inside each group and group weights from the mean member delta-I.
GroupPlan gdfws_plan(const AntennaCapture& capture, std::size_t group_size, const SchemeContext& ctx);

VoteOutcome gdfws_identify(const AntennaCapture& capture, std::size_t group_size, const SchemeContext& ctx,
                           const TrainedModel& model);

} // namespace rffid
