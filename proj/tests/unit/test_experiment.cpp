#include "helpers.hpp"

#include "rffid/error.hpp"
#include "rffid/experiment.hpp"

#include <doctest.h>

#include <fstream>
#include <json.hpp>
#include <sstream>

using namespace rffid;
using testing_support::source_dir;

namespace {

ExperimentConfig config_from(const std::string& text)
{
    return parse_config(text, source_dir() / "configs");
}

std::string csv_of(const std::vector<ResultRecord>& rows)
{
    std::ostringstream out;
    write_results_csv(out, rows);
    return out.str();
}

std::string slurp(const std::filesystem::path& p)
{
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

const char* five_profiles = "profiles = ../profiles/T1.profile, ../profiles/T2.profile, ../profiles/T3.profile, "
                            "../profiles/T4.profile, ../profiles/T5.profile\n";

} // namespace

TEST_SUITE("experiment")
{
    TEST_CASE("config parsing")
    {
        const auto c = load_config(source_dir() / "configs" / "miws_itd.cfg");
        CHECK(c.profiles.size() == 5);
        CHECK(c.trials == 100);
        CHECK(c.chi == std::vector<double>{0.001, 0.01, 0.1, 1});
        CHECK(c.schemes.size() == 6);
        CHECK(c.schemes[2].name == "ORS1");
        CHECK(c.schemes[2].antenna == 0);
        CHECK(c.feature == FeatureMethod::itd);
        CHECK(std::filesystem::exists(c.profiles[0]));

        const auto text = format_config(c);
        const auto again = parse_config(text);
        CHECK(format_config(again) == text);
        CHECK(config_hash(again) == config_hash(c));
        auto changed = again;
        changed.seed += 1;
        CHECK(config_hash(changed) != config_hash(c));

        const auto d = config_from(std::string(five_profiles) + "snr_list = 5, inf\nschemes = DFS\nn_antennas = 4\n");
        CHECK(std::isinf(d.snr_list[1]));
        CHECK(d.effective_group_size(512) == 128);
        CHECK(d.receiver(4).n_antennas == 4);
    }

    TEST_CASE("config errors name the key")
    {
        try {
            config_from(std::string(five_profiles) + "snr_lists = 15\n");
            FAIL("unknown key accepted");
        } catch (const ConfigError& e) {
            CHECK(std::string(e.what()).find("snr_lists") != std::string::npos);
        }
        CHECK_THROWS_AS(config_from(std::string(five_profiles) + "trials = many\nschemes = ORS\n"), ConfigError);
        CHECK_THROWS_AS(config_from(std::string(five_profiles) + "schemes = BEST\n"), ConfigError);
        CHECK_THROWS_AS(config_from(std::string(five_profiles) + "schemes = ORS\nn_antennas = 4\nchi = 0.1, 0.2\n"),
                        ConfigError);
        CHECK_THROWS_AS(config_from(std::string(five_profiles) + "schemes = DFS\nn_antennas = 1\n"), ConfigError);
        CHECK_THROWS_AS(config_from("profiles = ../profiles/T1.profile\nschemes = ORS\n"), ConfigError);
        CHECK_THROWS_AS(load_config(source_dir() / "configs" / "missing.cfg"), ConfigError);

        const auto c = config_from("profiles = ../profiles/T1.profile, ../profiles/T9.profile\nschemes = ORS\n");
        try {
            load_emitters(c);
            FAIL("missing profile accepted");
        } catch (const Error& e) {
            CHECK(std::string(e.what()).find("T9.profile") != std::string::npos);
        }
    }

    TEST_CASE("smoke run")
    {
        const auto c = load_config(source_dir() / "configs" / "smoke.cfg");
        const auto rows = run_experiment(c, 1);
        REQUIRE(rows.size() == 2 * c.schemes.size());
        for (const auto& r : rows) {
            CHECK(r.accuracy >= 0.0);
            CHECK(r.accuracy <= 1.0);
            CHECK(r.n_antennas == 2);
            CHECK(r.feature == "lms");
        }
        const auto text = csv_of(rows);
        CHECK(text.rfind(std::string(results_header) + "\n", 0) == 0);
        CHECK(text == csv_of(run_experiment(c, 3)));
    }

    TEST_CASE("record count over a sweep")
    {
        auto c = config_from(
            "profiles = ../profiles/T1.profile, ../profiles/T2.profile\ntrain_frames = 4\ntest_frames = 2\n"
            "trials = 3\nsnr_list = 5, 25\nn_antennas = 2, 3\nschemes = ORS, GDFWS\ngroup_size = 2\n"
            "feature = itd\n");
        const auto rows = run_experiment(c, 2);
        CHECK(rows.size() == 2 * 2 * 2 * 3);
        // Canonical order: antenna count, scheme, SNR, trial.
        CHECK(rows.front().n_antennas == 2);
        CHECK(rows.front().scheme == "ORS");
        CHECK(rows[1].trial == 1);
        CHECK(rows[3].snr_db == 25.0);
        CHECK(rows.back().scheme == "GDFWS");
        CHECK(rows.back().n_antennas == 3);
    }

    TEST_CASE("impairment-free fingerprints are separable")
    {
        for (const char* feature : {"lms", "itd"}) {
            const auto c = config_from(std::string(five_profiles) +
                                       "trials = 1\nsnr_list = inf\nn_antennas = 1\nchi = 0\nschemes = ORS\n"
                                       "jitter_delta = 0\nquantizer = false\nfeature = " +
                                       feature + "\n");
            const auto rows = run_experiment(c, 1);
            REQUIRE(rows.size() == 1);
            CHECK_MESSAGE(rows[0].accuracy >= 0.95, feature);
        }
    }

    TEST_CASE("shuffled labels sit at chance")
    {
        const auto c = config_from(std::string(five_profiles) +
                                   "trials = 1\nsnr_list = inf\nn_antennas = 1\nchi = 0\nschemes = ORS\n"
                                   "jitter_delta = 0\nquantizer = false\nshuffle_labels = true\n");
        const auto rows = run_experiment(c, 1);
        REQUIRE(rows.size() == 1);
        CHECK(rows[0].accuracy >= 0.1);
        CHECK(rows[0].accuracy <= 0.3);
    }

    TEST_CASE("dataset generation")
    {
        const auto c = load_config(source_dir() / "configs" / "smoke.cfg");
        const auto dir = testing_support::scratch("gen_a");
        const auto summary = gen_dataset(c, dir);
        CHECK(summary.frame_records == 2u * (10 + 5) * 2);
        CHECK(summary.files.size() == 2u * 2);

        const auto manifest = nlohmann::json::parse(slurp(dir / "manifest.json"));
        CHECK(manifest["frame_records"] == summary.frame_records);
        CHECK(manifest["seed"] == 7);

        std::size_t lines = 0;
        for (const auto& f : summary.files) {
            std::ifstream in(dir / f.filename());
            for (std::string line; std::getline(in, line);) {
                ++lines;
                CHECK(nlohmann::json::parse(line).contains("truth"));
            }
        }
        CHECK(lines == summary.capture_records);

        const auto dir2 = testing_support::scratch("gen_b");
        gen_dataset(c, dir2);
        for (const auto& f : summary.files)
            CHECK(slurp(dir / f.filename()) == slurp(dir2 / f.filename()));
        CHECK(slurp(dir / "manifest.json") == slurp(dir2 / "manifest.json"));

        auto pilot = c;
        pilot.mi_mode = MiMode::pilot;
        const auto dir3 = testing_support::scratch("gen_pilot");
        const auto ps = gen_dataset(pilot, dir3);
        std::ifstream in(dir3 / ps.files.front().filename());
        std::string line;
        std::getline(in, line);
        CHECK_FALSE(nlohmann::json::parse(line).contains("truth"));
    }

    TEST_CASE("formatting helpers")
    {
        CHECK(format_snr(15.0) == "15");
        CHECK(format_snr(std::numeric_limits<double>::infinity()) == "inf");
        CHECK(format_chi({0.001, 0.01}) == "0.001;0.01");
        CHECK(parse_scheme_spec("ORS3").antenna == 2);
        CHECK_THROWS_AS(parse_scheme_spec("ORS0"), ConfigError);
    }
}
