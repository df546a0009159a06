#include "rffid/experiment.hpp"

#include "rffid/capture_io.hpp"
#include "rffid/error.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

namespace rffid {

namespace {

std::string trim(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(std::string_view s)
{
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= s.size()) {
        const auto comma = s.find(',', start);
        const auto end = comma == std::string_view::npos ? s.size() : comma;
        auto item = trim(s.substr(start, end - start));
        if (!item.empty())
            out.push_back(std::move(item));
        if (comma == std::string_view::npos)
            break;
        start = comma + 1;
    }
    return out;
}

double to_real(const std::string& key, const std::string& v)
{
    if (v == "inf" || v == "+inf")
        return std::numeric_limits<double>::infinity();
    try {
        std::size_t used = 0;
        const double d = std::stod(v, &used);
        if (used == v.size())
            return d;
    } catch (const std::exception&) {
    }
    throw ConfigError("key '" + key + "': '" + v + "' is not a number");
}

long long to_int(const std::string& key, const std::string& v)
{
    try {
        std::size_t used = 0;
        const long long i = std::stoll(v, &used);
        if (used == v.size())
            return i;
    } catch (const std::exception&) {
    }
    throw ConfigError("key '" + key + "': '" + v + "' is not an integer");
}

std::uint64_t to_u64(const std::string& key, const std::string& v)
{
    try {
        std::size_t used = 0;
        const unsigned long long i = std::stoull(v, &used);
        if (used == v.size() && v.front() != '-')
            return i;
    } catch (const std::exception&) {
    }
    throw ConfigError("key '" + key + "': '" + v + "' is not an unsigned integer");
}

bool to_bool(const std::string& key, const std::string& v)
{
    if (v == "true" || v == "1" || v == "on" || v == "yes")
        return true;
    if (v == "false" || v == "0" || v == "off" || v == "no")
        return false;
    throw ConfigError("key '" + key + "': '" + v + "' is not a boolean");
}

std::string real_text(double v)
{
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

template <class T, class F>
std::string join(const std::vector<T>& xs, F f, const char* sep = ",")
{
    std::string out;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i)
            out += sep;
        out += f(xs[i]);
    }
    return out;
}

} // namespace

SchemeSpec parse_scheme_spec(std::string_view token)
{
    SchemeSpec s;
    s.name = std::string(token);
    if (token.size() > 3 && token.substr(0, 3) == "ORS") {
        const std::string digits(token.substr(3));
        if (digits.find_first_not_of("0123456789") != std::string::npos)
            throw ConfigError("unknown scheme '" + s.name + "'");
        const long k = std::stol(digits);
        if (k < 1)
            throw ConfigError("ORS antenna index is 1-based: '" + s.name + "'");
        s.scheme = Scheme::ors;
        s.antenna = static_cast<std::size_t>(k - 1);
        return s;
    }
    s.scheme = parse_scheme(token);
    return s;
}

ExperimentConfig::ExperimentConfig()
{
    schemes = {parse_scheme_spec("ORS"), parse_scheme_spec("DFS")};
}

void ExperimentConfig::validate() const
{
    if (profiles.size() < 2)
        throw ConfigError("profiles: at least two emitter profiles are needed");
    if (train_frames < 2 || test_frames < 1 || trials < 1)
        throw ConfigError("train_frames >= 2, test_frames >= 1 and trials >= 1 are required");
    if (snr_list.empty())
        throw ConfigError("snr_list is empty");
    for (double s : snr_list)
        if (std::isnan(s) || s == -std::numeric_limits<double>::infinity())
            throw ConfigError("snr_list: values must be finite or inf");
    if (n_antennas.empty())
        throw ConfigError("n_antennas is empty");
    for (int n : n_antennas)
        if (n < 1)
            throw ConfigError("n_antennas: counts must be >= 1");
    if (chi.empty())
        throw ConfigError("chi is empty");
    if (chi.size() > 1) {
        if (n_antennas.size() != 1 || chi.size() != static_cast<std::size_t>(n_antennas.front()))
            throw ConfigError("chi: a per-antenna list needs a single n_antennas value of the same length");
    }
    for (double c : chi)
        if (!(c >= 0.0))
            throw ConfigError("chi: values must be >= 0");
    if (schemes.empty())
        throw ConfigError("schemes is empty");
    const int n_min = *std::min_element(n_antennas.begin(), n_antennas.end());
    for (const auto& s : schemes) {
        if (s.scheme == Scheme::ors && s.antenna >= static_cast<std::size_t>(n_min))
            throw ConfigError("schemes: " + s.name + " needs more antennas than n_antennas provides");
        if ((s.scheme == Scheme::dfs || s.scheme == Scheme::gdfws) && n_min < 2)
            throw ConfigError("schemes: " + s.name + " needs at least two antennas");
        if (s.scheme == Scheme::gdfws)
            for (int n : n_antennas)
                (void)effective_group_size(n);
    }
    if (group_size < 0)
        throw ConfigError("group_size must be >= 0");
    if (!(std::abs(jitter_delta) < 0.5))
        throw ConfigError("jitter_delta: |delta| must be < 0.5");
    if (quantizer && (!(quant_v > 0.0) || quant_eps < 1))
        throw ConfigError("quantizer needs quant_v > 0 and quant_eps >= 1");
    if (lms.order < 1 || !(lms.mu > 0.0) || lms.max_epochs < 1)
        throw ConfigError("lms_order >= 1, lms_mu > 0 and lms_max_epochs >= 1 are required");
    if (itd_levels < 1)
        throw ConfigError("itd_levels must be >= 1");
    if (threads < 0)
        throw ConfigError("threads must be >= 0");
}

int ExperimentConfig::effective_group_size(int n) const
{
    const int g = group_size > 0 ? group_size : std::max(2, (n + 3) / 4);
    if (g < 2)
        throw ConfigError("group_size must be >= 2 for GDFWS");
    if (g > n)
        throw ConfigError("group_size " + std::to_string(g) + " exceeds n_antennas " + std::to_string(n));
    return g;
}

ReceiverProfile ExperimentConfig::receiver(int n) const
{
    ReceiverProfile rx;
    rx.n_antennas = n;
    rx.chi = chi;
    rx.jitter_delta = jitter_delta;
    rx.jitter_mode = jitter_mode;
    rx.lo_freq_norm = lo_freq_norm;
    rx.quantizer = quantizer;
    rx.quant_v = quant_v;
    rx.quant_eps = quant_eps;
    rx.phase_model = phase_model;
    rx.phase_walk = phase_walk;
    return rx;
}

FeatureConfig ExperimentConfig::feature_config() const
{
    FeatureConfig fc;
    fc.method = feature;
    fc.itd_levels = itd_levels;
    fc.itd_span = itd_span;
    fc.lms = lms;
    return fc;
}

ExperimentConfig parse_config(std::string_view text, const std::filesystem::path& base_dir)
{
    ExperimentConfig c;
    std::istringstream in{std::string(text)};
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        line = trim(line);
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(std::string_view(line).substr(0, eq));
        const std::string val = trim(std::string_view(line).substr(eq + 1));

        if (key == "profiles") {
            c.profiles.clear();
            for (const auto& p : split_list(val)) {
                std::filesystem::path path(p);
                c.profiles.push_back(path.is_absolute() ? path : base_dir / path);
            }
        } else if (key == "train_frames") {
            c.train_frames = static_cast<int>(to_int(key, val));
        } else if (key == "test_frames") {
            c.test_frames = static_cast<int>(to_int(key, val));
        } else if (key == "trials") {
            c.trials = static_cast<int>(to_int(key, val));
        } else if (key == "snr_list") {
            c.snr_list.clear();
            for (const auto& v : split_list(val))
                c.snr_list.push_back(to_real(key, v));
        } else if (key == "n_antennas") {
            c.n_antennas.clear();
            for (const auto& v : split_list(val))
                c.n_antennas.push_back(static_cast<int>(to_int(key, v)));
        } else if (key == "chi") {
            c.chi.clear();
            for (const auto& v : split_list(val))
                c.chi.push_back(to_real(key, v));
        } else if (key == "schemes") {
            c.schemes.clear();
            for (const auto& v : split_list(val))
                c.schemes.push_back(parse_scheme_spec(v));
        } else if (key == "feature") {
            c.feature = parse_feature_method(val);
        } else if (key == "group_size") {
            c.group_size = static_cast<int>(to_int(key, val));
        } else if (key == "jitter_delta") {
            c.jitter_delta = to_real(key, val);
        } else if (key == "jitter_mode") {
            if (val == "constant")
                c.jitter_mode = JitterMode::constant;
            else if (val == "uniform")
                c.jitter_mode = JitterMode::uniform;
            else
                throw ConfigError("jitter_mode: expected constant or uniform");
        } else if (key == "lo_freq_norm") {
            c.lo_freq_norm = to_real(key, val);
        } else if (key == "quantizer") {
            c.quantizer = to_bool(key, val);
        } else if (key == "quant_v") {
            c.quant_v = to_real(key, val);
        } else if (key == "quant_eps") {
            c.quant_eps = static_cast<int>(to_int(key, val));
        } else if (key == "seed") {
            c.seed = to_u64(key, val);
        } else if (key == "mi_mode") {
            c.mi_mode = parse_mi_mode(val);
        } else if (key == "ratio_mode") {
            c.ratio_mode = parse_ratio_mode(val);
        } else if (key == "pa_literal_power") {
            c.pa_literal_power = to_bool(key, val);
        } else if (key == "fading") {
            if (val == "unit")
                c.fading = Fading::unit;
            else if (val == "rayleigh")
                c.fading = Fading::rayleigh;
            else
                throw ConfigError("fading: expected unit or rayleigh");
        } else if (key == "phase_model") {
            if (val == "tracked")
                c.phase_model = PhaseModel::tracked;
            else if (val == "wiener")
                c.phase_model = PhaseModel::wiener;
            else
                throw ConfigError("phase_model: expected tracked or wiener");
        } else if (key == "phase_walk") {
            c.phase_walk = to_real(key, val);
        } else if (key == "lms_order") {
            c.lms.order = static_cast<int>(to_int(key, val));
        } else if (key == "lms_mu") {
            c.lms.mu = to_real(key, val);
        } else if (key == "lms_max_epochs") {
            c.lms.max_epochs = static_cast<int>(to_int(key, val));
        } else if (key == "lms_tol") {
            c.lms.tol = to_real(key, val);
        } else if (key == "itd_levels") {
            c.itd_levels = static_cast<int>(to_int(key, val));
        } else if (key == "itd_span") {
            if (val == "pilot")
                c.itd_span = ItdSpan::pilot;
            else if (val == "frame")
                c.itd_span = ItdSpan::frame;
            else
                throw ConfigError("itd_span: expected pilot or frame");
        } else if (key == "svm_lambda") {
            c.svm.lambda = to_real(key, val);
        } else if (key == "svm_epochs") {
            c.svm.epochs = static_cast<int>(to_int(key, val));
        } else if (key == "svm_lr") {
            c.svm.lr = to_real(key, val);
        } else if (key == "shuffle_labels") {
            c.shuffle_labels = to_bool(key, val);
        } else if (key == "threads") {
            c.threads = static_cast<int>(to_int(key, val));
        } else {
            throw ConfigError("unknown config key '" + key + "' on line " + std::to_string(lineno));
        }
    }
    c.validate();
    return c;
}

ExperimentConfig load_config(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ConfigError("cannot read config " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), path.parent_path().empty() ? std::filesystem::path(".") : path.parent_path());
}

std::string format_config(const ExperimentConfig& c)
{
    auto jm = c.jitter_mode == JitterMode::constant ? "constant" : "uniform";
    auto fm = c.fading == Fading::unit ? "unit" : "rayleigh";
    auto pm = c.phase_model == PhaseModel::tracked ? "tracked" : "wiener";
    auto b = [](bool v) { return v ? "true" : "false"; };
    std::ostringstream o;
    o << "profiles = " << join(c.profiles, [](const auto& p) { return p.generic_string(); }) << '\n'
      << "train_frames = " << c.train_frames << '\n'
      << "test_frames = " << c.test_frames << '\n'
      << "trials = " << c.trials << '\n'
      << "snr_list = " << join(c.snr_list, real_text) << '\n'
      << "n_antennas = " << join(c.n_antennas, [](int n) { return std::to_string(n); }) << '\n'
      << "chi = " << join(c.chi, real_text) << '\n'
      << "schemes = " << join(c.schemes, [](const SchemeSpec& s) { return s.name; }) << '\n'
      << "feature = " << to_string(c.feature) << '\n'
      << "group_size = " << c.group_size << '\n'
      << "jitter_delta = " << real_text(c.jitter_delta) << '\n'
      << "jitter_mode = " << jm << '\n'
      << "lo_freq_norm = " << real_text(c.lo_freq_norm) << '\n'
      << "quantizer = " << b(c.quantizer) << '\n'
      << "quant_v = " << real_text(c.quant_v) << '\n'
      << "quant_eps = " << c.quant_eps << '\n'
      << "seed = " << c.seed << '\n'
      << "mi_mode = " << to_string(c.mi_mode) << '\n'
      << "ratio_mode = " << to_string(c.ratio_mode) << '\n'
      << "pa_literal_power = " << b(c.pa_literal_power) << '\n'
      << "fading = " << fm << '\n'
      << "phase_model = " << pm << '\n'
      << "phase_walk = " << real_text(c.phase_walk) << '\n'
      << "lms_order = " << c.lms.order << '\n'
      << "lms_mu = " << real_text(c.lms.mu) << '\n'
      << "lms_max_epochs = " << c.lms.max_epochs << '\n'
      << "lms_tol = " << real_text(c.lms.tol) << '\n'
      << "itd_levels = " << c.itd_levels << '\n'
      << "itd_span = " << (c.itd_span == ItdSpan::pilot ? "pilot" : "frame") << '\n'
      << "svm_lambda = " << real_text(c.svm.lambda) << '\n'
      << "svm_epochs = " << c.svm.epochs << '\n'
      << "svm_lr = " << real_text(c.svm.lr) << '\n'
      << "shuffle_labels = " << b(c.shuffle_labels) << '\n';
    return o.str();
}

std::uint64_t config_hash(const ExperimentConfig& config)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : format_config(config)) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string format_snr(double snr_db)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", snr_db);
    return buf;
}

std::string format_chi(const std::vector<double>& chi)
{
    return join(chi, [](double c) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%g", c);
        return std::string(buf);
    }, ";");
}

std::vector<EmitterProfile> load_emitters(const ExperimentConfig& config)
{
    std::vector<EmitterProfile> out;
    for (const auto& p : config.profiles)
        out.push_back(load_profile(p));
    return out;
}

namespace {

struct Needs {
    std::vector<bool> antenna;  // per-antenna raw-row features
    bool all_antennas = false;
    bool delta = false;         // per-antenna delta-I
    bool dfs = false;
    bool gdfws = false;
};

Needs needs_for(const ExperimentConfig& c, int n)
{
    Needs nd;
    nd.antenna.assign(static_cast<std::size_t>(n), false);
    for (const auto& s : c.schemes) {
        switch (s.scheme) {
        case Scheme::ors:
            nd.antenna[s.antenna] = true;
            break;
        case Scheme::uws:
            nd.all_antennas = true;
            break;
        case Scheme::miws:
            nd.all_antennas = true;
            nd.delta = true;
            break;
        case Scheme::dfs:
            nd.dfs = true;
            break;
        case Scheme::gdfws:
            nd.gdfws = true;
            nd.delta = true;
            break;
        }
    }
    if (nd.all_antennas)
        std::fill(nd.antenna.begin(), nd.antenna.end(), true);
    return nd;
}

// Features of one frame at one SNR, as needed by the configured schemes.
struct FrameFeatures {
    std::vector<std::vector<double>> antenna;  // empty where not needed
    std::vector<double> delta;
    std::vector<double> dfs;
    std::vector<std::vector<double>> groups;
    std::vector<double> group_weights;
};

std::vector<int> training_labels(const ExperimentConfig& c, std::size_t emitters, std::uint64_t trial)
{
    const auto frames = static_cast<std::size_t>(c.train_frames);
    std::vector<int> labels;
    for (std::size_t m = 0; m < emitters; ++m)
        labels.insert(labels.end(), frames, static_cast<int>(m));
    if (c.shuffle_labels) {
        const RandomStream rs(c.seed, StreamCoords{trial, 0, common_antenna, Purpose::shuffle});
        for (std::size_t i = labels.size() - 1; i > 0; --i) {
            const auto j = static_cast<std::size_t>(rs.uniform(i) * static_cast<double>(i + 1));
            std::swap(labels[i], labels[std::min(j, i)]);
        }
    }
    return labels;
}

} // namespace

std::vector<ResultRecord> run_trial(const ExperimentConfig& c, const std::vector<EmitterProfile>& emitters,
                                    std::uint64_t trial)
{
    const std::size_t m_count = emitters.size();
    const auto train = static_cast<std::size_t>(c.train_frames);
    const auto test = static_cast<std::size_t>(c.test_frames);
    const std::size_t per = train + test;
    const std::size_t n_snr = c.snr_list.size();
    const FeatureExtractor extract(c.feature_config());
    const FrameLayout layout;

    EmitOptions eo;
    eo.pa_form = c.pa_literal_power ? PaForm::literal_power : PaForm::baseband;

    // Emitted waveforms do not depend on the receiver, so share them across antenna counts.
    std::vector<ComplexSequence> x2(m_count * per);
    for (std::size_t m = 0; m < m_count; ++m) {
        const auto filter = build_shaping_filter(emitters[m], eo.filter);
        for (std::size_t j = 0; j < per; ++j) {
            const std::uint64_t frame_id = m * per + j;
            const RandomStream bits(c.seed, StreamCoords{trial, frame_id, common_antenna, Purpose::bits});
            x2[frame_id] = emit(emitters[m], filter, random_frame(bits, layout), eo);
        }
    }

    const auto train_labels = training_labels(c, m_count, trial);
    const StreamContext sctx{c.seed, trial};
    PilotInfo pilot;
    if (c.mi_mode == MiMode::pilot) {
        pilot.waveform = ideal_pilot_reference();
        pilot.region = pilot_region_length();
    }

    std::vector<ResultRecord> records;
    for (int n : c.n_antennas) {
        const ReceiverProfile rx = c.receiver(n);
        const Needs need = needs_for(c, n);
        const std::size_t group = need.gdfws ? static_cast<std::size_t>(c.effective_group_size(n)) : 0;
        SchemeContext sc;
        sc.mi_mode = c.mi_mode;
        sc.ratio_mode = c.ratio_mode;
        sc.pilot = &pilot;
        sc.features = [&](std::span<const Complex> x) { return extract(x).values; };

        // feats[s][frame]
        std::vector<std::vector<FrameFeatures>> feats(n_snr, std::vector<FrameFeatures>(m_count * per));
        const bool keep_truth = need.delta && c.mi_mode == MiMode::oracle;
        for (std::size_t f = 0; f < x2.size(); ++f) {
            auto caps = receive_sweep(x2[f], c.fading, c.snr_list, rx, f, sctx, keep_truth);
            for (std::size_t s = 0; s < n_snr; ++s) {
                auto& ff = feats[s][f];
                const auto& cap = caps[s];
                ff.antenna.resize(static_cast<std::size_t>(n));
                for (std::size_t i = 0; i < need.antenna.size(); ++i)
                    if (need.antenna[i])
                        ff.antenna[i] = sc.features(cap.y[i]);
                if (need.delta && need.all_antennas)
                    ff.delta = antenna_delta_mi(cap, c.mi_mode, &pilot);
                if (need.dfs)
                    ff.dfs = sc.features(dfs_recover_robust(cap.y, c.ratio_mode).x_tilde);
                if (need.gdfws) {
                    const auto plan = gdfws_plan(cap, group, sc);
                    for (const auto& xt : plan.x_tilde)
                        ff.groups.push_back(sc.features(xt));
                    ff.group_weights = plan.weights.omega;
                }
            }
        }

        auto frame_of = [&](std::size_t m, std::size_t j) { return m * per + j; };

        for (std::size_t s = 0; s < n_snr; ++s) {
            const auto& fs = feats[s];
            auto train_on = [&](auto&& pick) {
                LabeledDataset d;
                std::size_t k = 0;
                for (std::size_t m = 0; m < m_count; ++m)
                    for (std::size_t j = 0; j < train; ++j)
                        pick(d, fs[frame_of(m, j)], train_labels[k++]);
                return rffid::train(d, c.svm);
            };

            std::vector<TrainedModel> antenna_models(static_cast<std::size_t>(n));
            for (std::size_t i = 0; i < need.antenna.size(); ++i)
                if (need.antenna[i])
                    antenna_models[i] =
                        train_on([&](LabeledDataset& d, const FrameFeatures& ff, int l) { d.add(ff.antenna[i], l); });
            TrainedModel dfs_model, gdfws_model;
            if (need.dfs)
                dfs_model = train_on([](LabeledDataset& d, const FrameFeatures& ff, int l) { d.add(ff.dfs, l); });
            if (need.gdfws)
                gdfws_model = train_on([](LabeledDataset& d, const FrameFeatures& ff, int l) {
                    for (const auto& g : ff.groups)
                        d.add(g, l);
                });

            const int classes = static_cast<int>(m_count);
            for (const auto& spec : c.schemes) {
                std::size_t hits = 0;
                for (std::size_t m = 0; m < m_count; ++m)
                    for (std::size_t j = train; j < per; ++j) {
                        const auto& ff = fs[frame_of(m, j)];
                        int label = 0;
                        switch (spec.scheme) {
                        case Scheme::ors:
                            label = antenna_models[spec.antenna].predict(ff.antenna[spec.antenna]).label;
                            break;
                        case Scheme::uws:
                        case Scheme::miws: {
                            std::vector<int> votes(static_cast<std::size_t>(n));
                            for (std::size_t i = 0; i < votes.size(); ++i)
                                votes[i] = antenna_models[i].predict(ff.antenna[i]).label;
                            std::vector<double> w;
                            if (spec.scheme == Scheme::uws)
                                w.assign(votes.size(), 1.0 / static_cast<double>(votes.size()));
                            else
                                w = miws_weights(ff.delta).omega;
                            label = weighted_vote(votes, w, classes).label;
                            break;
                        }
                        case Scheme::dfs:
                            label = dfs_model.predict(ff.dfs).label;
                            break;
                        case Scheme::gdfws: {
                            std::vector<int> votes;
                            for (const auto& g : ff.groups)
                                votes.push_back(gdfws_model.predict(g).label);
                            label = weighted_vote(votes, ff.group_weights, classes).label;
                            break;
                        }
                        }
                        if (label == static_cast<int>(m))
                            ++hits;
                    }
                ResultRecord r;
                r.scheme = spec.name;
                r.feature = std::string(to_string(c.feature));
                r.snr_db = c.snr_list[s];
                r.n_antennas = n;
                r.group_size = spec.scheme == Scheme::gdfws ? static_cast<int>(group) : 0;
                r.chi = format_chi(c.chi);
                r.trial = trial;
                r.seed = c.seed;
                r.accuracy = static_cast<double>(hits) / static_cast<double>(m_count * test);
                records.push_back(std::move(r));
            }
        }
    }
    return records;
}

std::vector<ResultRecord> run_experiment(const ExperimentConfig& config, int threads)
{
    config.validate();
    const auto emitters = load_emitters(config);
    const auto trials = static_cast<std::size_t>(config.trials);

    int workers = threads >= 0 ? threads : config.threads;
    if (workers == 0)
        workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    workers = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(workers), trials));

    std::vector<std::vector<ResultRecord>> per_trial(trials);
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto work = [&] {
        for (;;) {
            const std::size_t t = next.fetch_add(1);
            if (t >= trials)
                return;
            try {
                per_trial[t] = run_trial(config, emitters, t);
            } catch (...) {
                const std::lock_guard lock(failure_mutex);
                if (!failure)
                    failure = std::current_exception();
                next = trials;
                return;
            }
        }
    };
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (int i = 0; i < workers; ++i)
            pool.emplace_back(work);
        for (auto& th : pool)
            th.join();
    }
    if (failure)
        std::rethrow_exception(failure);

    std::vector<ResultRecord> out;
    for (auto& v : per_trial)
        for (auto& r : v)
            out.push_back(std::move(r));

    // Canonical order: antenna count, scheme (config order), SNR (config order), trial.
    auto index_of = [](const auto& list, const auto& v) {
        return static_cast<std::size_t>(std::find(list.begin(), list.end(), v) - list.begin());
    };
    std::vector<std::string> scheme_names;
    for (const auto& s : config.schemes)
        scheme_names.push_back(s.name);
    std::stable_sort(out.begin(), out.end(), [&](const ResultRecord& a, const ResultRecord& b) {
        const auto ka = std::make_tuple(index_of(config.n_antennas, a.n_antennas), index_of(scheme_names, a.scheme),
                                        index_of(config.snr_list, a.snr_db), a.trial);
        const auto kb = std::make_tuple(index_of(config.n_antennas, b.n_antennas), index_of(scheme_names, b.scheme),
                                        index_of(config.snr_list, b.snr_db), b.trial);
        return ka < kb;
    });
    return out;
}

void write_results_csv(std::ostream& out, const std::vector<ResultRecord>& records)
{
    out << results_header << '\n';
    char acc[32];
    for (const auto& r : records) {
        std::snprintf(acc, sizeof acc, "%.10g", r.accuracy);
        out << r.scheme << ',' << r.feature << ',' << format_snr(r.snr_db) << ',' << r.n_antennas << ','
            << r.group_size << ',' << r.chi << ',' << r.trial << ',' << r.seed << ',' << acc << '\n';
    }
}

void write_results_csv(const std::filesystem::path& path, const std::vector<ResultRecord>& records)
{
    if (path.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
    }
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw IoError("cannot open " + path.string() + " for writing");
    write_results_csv(out, records);
    if (!out)
        throw IoError("write failed: " + path.string());
}

DatasetSummary gen_dataset(const ExperimentConfig& c, const std::filesystem::path& out_dir)
{
    c.validate();
    const auto emitters = load_emitters(c);
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec)
        throw IoError("cannot create " + out_dir.string() + ": " + ec.message());

    const auto per = static_cast<std::size_t>(c.train_frames + c.test_frames);
    const bool truth = c.mi_mode == MiMode::oracle;
    EmitOptions eo;
    eo.pa_form = c.pa_literal_power ? PaForm::literal_power : PaForm::baseband;
    const FrameLayout layout;

    DatasetSummary sum;
    sum.hash = config_hash(c);
    for (std::uint64_t trial = 0; trial < static_cast<std::uint64_t>(c.trials); ++trial) {
        const StreamContext sctx{c.seed, trial};
        for (std::size_t m = 0; m < emitters.size(); ++m) {
            const auto filter = build_shaping_filter(emitters[m], eo.filter);
            char name[64];
            std::snprintf(name, sizeof name, "captures_e%zu_t%llu.jsonl", m, static_cast<unsigned long long>(trial));
            const auto path = out_dir / name;
            std::ofstream out(path, std::ios::binary);
            if (!out)
                throw IoError("cannot open " + path.string() + " for writing");
            for (std::size_t j = 0; j < per; ++j) {
                const std::uint64_t frame_id = m * per + j;
                const RandomStream bits(c.seed, StreamCoords{trial, frame_id, common_antenna, Purpose::bits});
                const auto x2 = emit(emitters[m], filter, random_frame(bits, layout), eo);
                ++sum.frame_records;
                for (int n : c.n_antennas) {
                    auto caps = receive_sweep(x2, c.fading, c.snr_list, c.receiver(n), frame_id, sctx, truth);
                    for (auto& cap : caps) {
                        cap.emitter = static_cast<int>(m);
                        out << capture_to_json(cap, truth) << '\n';
                        ++sum.capture_records;
                    }
                }
            }
            if (!out)
                throw IoError("write failed: " + path.string());
            sum.files.push_back(path);
        }
    }

    const auto manifest = out_dir / "manifest.json";
    std::ofstream mf(manifest, std::ios::binary);
    if (!mf)
        throw IoError("cannot open " + manifest.string() + " for writing");
    char hash[32];
    std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(sum.hash));
    mf << "{\n  \"config_hash\": \"" << hash << "\",\n  \"seed\": " << c.seed << ",\n  \"trials\": " << c.trials
       << ",\n  \"emitters\": " << emitters.size() << ",\n  \"frames_per_emitter\": " << per
       << ",\n  \"frame_records\": " << sum.frame_records << ",\n  \"capture_records\": " << sum.capture_records
       << ",\n  \"truth\": " << (truth ? "true" : "false") << ",\n  \"files\": [";
    for (std::size_t i = 0; i < sum.files.size(); ++i)
        mf << (i ? ", " : "") << '"' << sum.files[i].filename().generic_string() << '"';
    mf << "]\n}\n";
    if (!mf)
        throw IoError("write failed: " + manifest.string());
    return sum;
}

} // namespace rffid
