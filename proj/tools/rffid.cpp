// rffid: dataset generation, experiment sweeps, antenna-count analysis and plotting.

#include <rffid/analysis.hpp>
#include <rffid/error.hpp>
#include <rffid/experiment.hpp>
#include <rffid/plot.hpp>

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <iostream>
#include <optional>

namespace {

std::vector<int> parse_counts(const std::string& list)
{
    std::vector<int> out;
    std::size_t start = 0;
    while (start < list.size()) {
        auto comma = list.find(',', start);
        if (comma == std::string::npos)
            comma = list.size();
        out.push_back(std::stoi(list.substr(start, comma - start)));
        start = comma + 1;
    }
    return out;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Multi-antenna RF fingerprint identification simulator"};
    app.require_subcommand(1);

    auto* gen = app.add_subcommand("gen", "Generate a capture dataset");
    std::string gen_config, gen_out;
    std::optional<std::uint64_t> gen_seed;
    gen->add_option("--config", gen_config, "Experiment config file")->required();
    gen->add_option("--out", gen_out, "Output directory")->required();
    gen->add_option("--seed", gen_seed, "Master seed (overrides the config)");

    auto* run = app.add_subcommand("run", "Run an identification experiment");
    std::string run_config, run_out;
    std::vector<std::string> run_schemes;
    std::optional<std::string> run_feature;
    std::optional<int> run_trials, run_threads;
    std::optional<std::uint64_t> run_seed;
    run->add_option("--config", run_config, "Experiment config file")->required();
    run->add_option("--out", run_out, "Results CSV")->required();
    run->add_option("--scheme", run_schemes, "Schemes (ORS, ORS<k>, UWS, MIWS, DFS, GDFWS)")->delimiter(',');
    run->add_option("--feature", run_feature, "itd or lms");
    run->add_option("--trials", run_trials, "Number of trials");
    run->add_option("--threads", run_threads, "Worker threads (0 = all cores)");
    run->add_option("--seed", run_seed, "Master seed");

    auto* analyze = app.add_subcommand("analyze", "Tabulate the absolute accuracy bound xi against N");
    double alpha = 0.95, snr = 15.0;
    std::string n_list = "4,8,16,32,64,128,256,512";
    analyze->add_option("--alpha", alpha, "Confidence level")->capture_default_str();
    analyze->add_option("--snr", snr, "SNR in dB")->capture_default_str();
    analyze->add_option("--n", n_list, "Comma-separated antenna counts")->capture_default_str();

    auto* plt = app.add_subcommand("plot", "Render mean accuracy curves to SVG");
    std::string plot_in, plot_x = "snr_db", plot_y = "accuracy", plot_series = "scheme", plot_out;
    plt->add_option("--results", plot_in, "Results CSV")->required();
    plt->add_option("--x", plot_x, "X column")->capture_default_str();
    plt->add_option("--y", plot_y, "Y column")->capture_default_str();
    plt->add_option("--series", plot_series, "Series column")->capture_default_str();
    plt->add_option("--out", plot_out, "Output SVG")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*gen) {
            auto cfg = rffid::load_config(gen_config);
            if (gen_seed)
                cfg.seed = *gen_seed;
            const auto sum = rffid::gen_dataset(cfg, gen_out);
            std::printf("wrote %zu files, %zu frame records, %zu capture records to %s\n", sum.files.size(),
                        sum.frame_records, sum.capture_records, gen_out.c_str());
        } else if (*run) {
            auto cfg = rffid::load_config(run_config);
            if (!run_schemes.empty()) {
                cfg.schemes.clear();
                for (const auto& s : run_schemes)
                    cfg.schemes.push_back(rffid::parse_scheme_spec(s));
            }
            if (run_feature)
                cfg.feature = rffid::parse_feature_method(*run_feature);
            if (run_trials)
                cfg.trials = *run_trials;
            if (run_seed)
                cfg.seed = *run_seed;
            const auto t0 = std::chrono::steady_clock::now();
            const auto records = rffid::run_experiment(cfg, run_threads.value_or(-1));
            rffid::write_results_csv(run_out, records);
            const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - t0;
            std::fprintf(stderr, "%zu records in %.1f s -> %s\n", records.size(), dt.count(), run_out.c_str());
        } else if (*analyze) {
            const auto counts = parse_counts(n_list);
            const auto rows = rffid::xi_table(alpha, snr, counts);
            std::cout << rffid::format_xi_table(alpha, snr, rows);
        } else if (*plt) {
            rffid::plot(plot_in, plot_x, plot_y, plot_series, plot_out);
        }
    } catch (const rffid::Error& e) {
        std::cerr << "rffid: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "rffid: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
