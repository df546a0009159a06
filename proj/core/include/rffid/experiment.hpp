#pragma once

#include "rffid/analysis.hpp"
#include "rffid/classifier.hpp"
#include "rffid/emitter.hpp"
#include "rffid/features.hpp"
#include "rffid/frontend.hpp"
#include "rffid/schemes.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace rffid {

/// A scheme token: ORS, UWS, MIWS, DFS, GDFWS, or ORS<k> for antenna k (1-based).
struct SchemeSpec {
    Scheme scheme = Scheme::ors;
    std::size_t antenna = 0;
    std::string name;
};

SchemeSpec parse_scheme_spec(std::string_view token);

struct ExperimentConfig {
    std::vector<std::filesystem::path> profiles;
    int train_frames = 200;
    int test_frames = 100;
    int trials = 1000;
    std::vector<double> snr_list{15.0};
    std::vector<int> n_antennas{4};
    std::vector<double> chi{0.0};
    std::vector<SchemeSpec> schemes;
    FeatureMethod feature = FeatureMethod::lms;
    int group_size = 0;  // 0: max(2, ceil(n/4))
    double jitter_delta = 0.003;
    JitterMode jitter_mode = JitterMode::constant;
    double lo_freq_norm = 100.0;
    bool quantizer = true;
    double quant_v = 4.0;
    int quant_eps = 16;
    std::uint64_t seed = 1;
    MiMode mi_mode = MiMode::oracle;
    RatioMode ratio_mode = RatioMode::mean;
    bool pa_literal_power = false;
    Fading fading = Fading::unit;
    PhaseModel phase_model = PhaseModel::tracked;
    double phase_walk = 1.0;
    LmsConfig lms;
    int itd_levels = 4;
    ItdSpan itd_span = ItdSpan::pilot;
    TrainConfig svm;
    bool shuffle_labels = false;
    int threads = 0;  // 0: hardware concurrency

    ExperimentConfig();
    void validate() const;
    int effective_group_size(int n) const;
    ReceiverProfile receiver(int n) const;
    FeatureConfig feature_config() const;
};

/// Flat `key = value` text; `#` starts a comment; lists are comma separated.
/// Relative profile paths resolve against `base_dir`.
ExperimentConfig parse_config(std::string_view text, const std::filesystem::path& base_dir = ".");
ExperimentConfig load_config(const std::filesystem::path& path);

/// Canonical text form; parse_config(format_config(c)) reproduces c.
std::string format_config(const ExperimentConfig& config);

/// FNV-1a over the canonical text.
std::uint64_t config_hash(const ExperimentConfig& config);

struct ResultRecord {
    std::string scheme;
    std::string feature;
    double snr_db = 0.0;
    int n_antennas = 0;
    int group_size = 0;
    std::string chi;
    std::uint64_t trial = 0;
    std::uint64_t seed = 0;
    double accuracy = 0.0;
};

inline constexpr std::string_view results_header = "scheme,feature,snr_db,n_antennas,group_size,chi,trial,seed,accuracy";

/// Runs every trial; rows come back in canonical order (antenna count, scheme,
/// SNR, trial) whatever the thread count. threads < 0 uses config.threads.
std::vector<ResultRecord> run_experiment(const ExperimentConfig& config, int threads = -1);

/// Records of a single trial (the unit of parallel work).
std::vector<ResultRecord> run_trial(const ExperimentConfig& config, const std::vector<EmitterProfile>& emitters,
                                    std::uint64_t trial);

std::vector<EmitterProfile> load_emitters(const ExperimentConfig& config);

void write_results_csv(std::ostream& out, const std::vector<ResultRecord>& records);
void write_results_csv(const std::filesystem::path& path, const std::vector<ResultRecord>& records);

struct DatasetSummary {
    std::vector<std::filesystem::path> files;
    std::size_t frame_records = 0;    // emitters * (train + test) * trials
    std::size_t capture_records = 0;  // frame records times SNR and antenna-count entries
    std::uint64_t hash = 0;
};

/// JSON-lines captures per (emitter, trial) plus manifest.json.
DatasetSummary gen_dataset(const ExperimentConfig& config, const std::filesystem::path& out_dir);

std::string format_snr(double snr_db);
std::string format_chi(const std::vector<double>& chi);

} // namespace rffid
