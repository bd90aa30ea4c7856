#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace klconst {

enum class Mode { Design, SerSweep, KlCheck, PackUnitary };

Mode parse_mode(const std::string& name);
const char* mode_name(Mode mode);

// Flat "key = value" file; '#' starts a comment, lists are "[a, b, c]" or
// "a, b, c". Relative library paths resolve against the config's directory.
//
//   mode            design | ser-sweep | kl-check | pack-unitary
//   K, M, l_s       integers
//   snr_db          list of reals (dB, per receive antenna)
//   trials          SER trials per point, or Monte-Carlo samples for kl-check
//   seed            64-bit integer (default 1)
//   output          output path
//   unitary_library.<l_v> = <codebook path>   (missing l_v are packed on the fly)
//   schemes         subset of multilevel, unitary, pilot-qam (ser-sweep)
//   pairs           random point pairs for kl-check (default 20)
//   l_v             codebook size 2^{l_v} for pack-unitary
//   restarts, iterations, smoothing   packing optimizer settings
//   workers         simulation threads (0 = all cores)
struct ExperimentConfig {
    Mode mode = Mode::Design;
    int K = 0;
    int M = 0;
    int l_s = 0;
    std::vector<double> snr_db_list;
    std::uint64_t trials = 0;
    std::uint64_t seed = 1;
    std::map<int, std::filesystem::path> unitary_library_paths;
    std::filesystem::path output_path;

    std::vector<std::string> schemes{"multilevel", "unitary", "pilot-qam"};
    int pairs = 20;
    int l_v = 0;
    int restarts = 6;
    int iterations = 1500;
    double smoothing = 4000.0;
    unsigned workers = 0;

    // Checks the fields the mode needs; throws ConfigError naming the field.
    void validate() const;
};

// Parses the file contents. `mode_hint` (from the command line) fills in a
// missing "mode" key and must agree with it when both are present.
ExperimentConfig parse_config(std::istream& is, const std::string& source, std::optional<Mode> mode_hint = {},
                              const std::filesystem::path& base_dir = {});
ExperimentConfig load_config(const std::filesystem::path& path, std::optional<Mode> mode_hint = {});

} // namespace klconst
