#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <algorithm>
#include <sstream>

#include "klconst/config.hpp"
#include "klconst/errors.hpp"
#include "klconst/experiment.hpp"
#include "klconst/io.hpp"

using namespace klconst;
namespace fs = std::filesystem;

namespace {

ExperimentConfig parse(const std::string& text, std::optional<Mode> hint = {}, const fs::path& base = {}) {
    std::istringstream is(text);
    return parse_config(is, "<test>", hint, base);
}

fs::path scratch_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("klconst_cfg_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream is(p);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

} // namespace

TEST_CASE("parse a full ser-sweep config") {
    const ExperimentConfig c = parse("# sweep\n"
                                     "mode = ser-sweep\n"
                                     "K = 2\nM = 64\nl_s = 4\n"
                                     "snr_db = [-5, 0, 7.5]\n"
                                     "trials = 1000   # per point\n"
                                     "seed = 123456789012\n"
                                     "schemes = multilevel, unitary\n"
                                     "output = out.csv\n");
    CHECK(c.mode == Mode::SerSweep);
    CHECK(c.K == 2);
    CHECK(c.M == 64);
    CHECK(c.l_s == 4);
    CHECK(c.snr_db_list == std::vector<double>{-5, 0, 7.5});
    CHECK(c.trials == 1000);
    CHECK(c.seed == 123456789012ULL);
    CHECK(c.schemes == std::vector<std::string>{"multilevel", "unitary"});
    CHECK_NOTHROW(c.validate());
}

TEST_CASE("config errors") {
    CHECK_THROWS_AS(parse("mode = design\nbogus = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse("K = 2\nK = 3\n", Mode::Design), ConfigError);
    CHECK_THROWS_AS(parse("mode = design\nK = two\n"), ConfigError);
    CHECK_THROWS_AS(parse("mode = design\n", Mode::SerSweep), ConfigError);
    CHECK_THROWS_AS(parse("mode = flying\n"), ConfigError);
    CHECK_THROWS_AS(parse("mode = design\nunitary_library.1 = missing.txt\n", {}, scratch_dir("missing")),
                    ConfigError);
    CHECK_THROWS_AS(parse_mode("designs"), ConfigError);
    CHECK(parse("K = 2\n", Mode::KlCheck).mode == Mode::KlCheck);

    const ExperimentConfig no_trials = parse("mode = ser-sweep\nK = 2\nM = 4\nl_s = 2\nsnr_db = 0\noutput = x.csv\n");
    try {
        no_trials.validate();
        FAIL("validate accepted a config without trials");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("trials") != std::string::npos);
    }
    std::ostringstream log;
    CHECK(run(no_trials, log) == kExitConfig);
    CHECK(log.str().find("trials") != std::string::npos);
}

TEST_CASE("library paths resolve against the config directory") {
    const fs::path dir = scratch_dir("lib");
    save_unitary(UnitarySet::single(2), dir / "l0.txt");
    const ExperimentConfig c = parse("mode = design\nunitary_library.0 = l0.txt\n", {}, dir);
    REQUIRE(c.unitary_library_paths.count(0) == 1);
    CHECK(fs::equivalent(c.unitary_library_paths.at(0), dir / "l0.txt"));
}

TEST_CASE("snr conversion") {
    CHECK(snr_db_to_sigma2(2, 0.0) == doctest::Approx(0.5));
    CHECK(snr_db_to_sigma2(4, 10.0) == doctest::Approx(0.025));
    CHECK(ChannelParams::from_snr_db(8, 2, 20.0).snr_db() == doctest::Approx(20.0));
}

TEST_CASE("design run writes the allocation table and constellations") {
    const fs::path dir = scratch_dir("design");
    ExperimentConfig c = parse("mode = design\nK = 2\nl_s = 3\nsnr_db = [-10, 30]\n"
                               "restarts = 2\niterations = 300\noutput = design.csv\n",
                               {}, dir);
    c.output_path = dir / "design.csv";
    std::ostringstream log;
    REQUIRE(run(c, log) == kExitOk);
    std::istringstream csv(slurp(dir / "design.csv"));
    std::string line;
    std::getline(csv, line);
    CHECK(line == "snr_db,sigma2,l_alpha,min_kl,r0,alpha0,selected");
    int rows = 0;
    std::map<std::string, int> selected;
    std::map<std::string, double> best_kl, selected_kl;
    while (std::getline(csv, line)) {
        ++rows;
        std::vector<std::string> f;
        std::istringstream ls(line);
        for (std::string x; std::getline(ls, x, ',');) f.push_back(x);
        REQUIRE(f.size() == 7);
        best_kl[f[0]] = std::max(best_kl[f[0]], std::stod(f[3]));
        if (f[6] == "1") {
            selected[f[0]] = std::stoi(f[2]);
            selected_kl[f[0]] = std::stod(f[3]);
        }
    }
    CHECK(rows == 8);
    REQUIRE(selected.size() == 2);
    CHECK(selected["30"] == 0);
    CHECK(selected_kl["-10"] == best_kl["-10"]);
    CHECK(selected_kl["30"] == best_kl["30"]);
    const MultiLevelConstellation hi = load_constellation(dir / "design_snr30.const");
    CHECK(hi.size() == 8);
    CHECK(hi.levels().size() == 1);
    CHECK(fs::exists(dir / "design_snr-10.const"));
}

TEST_CASE("same seed gives byte-identical output") {
    const fs::path dir = scratch_dir("seed");
    ExperimentConfig c = parse("mode = ser-sweep\nK = 2\nM = 8\nl_s = 2\nsnr_db = [0, 5]\ntrials = 3000\n"
                               "restarts = 1\niterations = 200\nseed = 77\n",
                               {}, dir);
    std::ostringstream log;
    c.output_path = dir / "a.csv";
    c.workers = 1;
    REQUIRE(run(c, log) == kExitOk);
    c.output_path = dir / "b.csv";
    c.workers = 3;
    REQUIRE(run(c, log) == kExitOk);
    const std::string a = slurp(dir / "a.csv");
    CHECK(a == slurp(dir / "b.csv"));
    CHECK(a.rfind(std::string(kSerCsvHeader) + "\n", 0) == 0);
    CHECK(std::count(a.begin(), a.end(), '\n') == 7);

    c.output_path = dir / "c.csv";
    c.seed = 78;
    REQUIRE(run(c, log) == kExitOk);
    CHECK(a != slurp(dir / "c.csv"));
}

TEST_CASE("pack-unitary writes a loadable codebook") {
    const fs::path dir = scratch_dir("pack");
    ExperimentConfig c = parse("mode = pack-unitary\nK = 2\nl_v = 2\nrestarts = 2\niterations = 400\n", {}, dir);
    c.output_path = dir / "cb.txt";
    std::ostringstream log;
    REQUIRE(run(c, log) == kExitOk);
    const UnitarySet u = load_unitary(dir / "cb.txt");
    CHECK(u.size() == 4);
    CHECK(u.t_v() > 0.6);
}
