#include "klconst/config.hpp"

#include <fstream>
#include <istream>
#include <set>
#include <sstream>

#include "klconst/errors.hpp"

namespace klconst {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

class Field {
public:
    Field(std::string key, std::string value, std::string where)
        : key_(std::move(key)), value_(std::move(value)), where_(std::move(where)) {}

    [[noreturn]] void fail(const std::string& what) const {
        throw ConfigError(where_ + ": field '" + key_ + "': " + what);
    }

    long long integer() const { return integer(value_); }

    double real() const { return real(value_); }

    std::vector<std::string> list() const {
        std::string body = value_;
        if (!body.empty() && body.front() == '[') {
            if (body.back() != ']') fail("unterminated list");
            body = body.substr(1, body.size() - 2);
        }
        std::vector<std::string> items;
        std::stringstream ss(body);
        for (std::string item; std::getline(ss, item, ',');) {
            item = trim(item);
            if (item.empty()) fail("empty list element");
            items.push_back(item);
        }
        return items;
    }

    std::vector<double> reals() const {
        std::vector<double> out;
        for (const auto& item : list()) out.push_back(real(item));
        return out;
    }

    const std::string& text() const { return value_; }

private:
    long long integer(const std::string& s) const {
        std::size_t used = 0;
        long long v = 0;
        try {
            v = std::stoll(s, &used);
        } catch (const std::exception&) {
            fail("expected an integer, got '" + s + "'");
        }
        if (used != s.size()) fail("expected an integer, got '" + s + "'");
        return v;
    }

    double real(const std::string& s) const {
        std::size_t used = 0;
        double v = 0;
        try {
            v = std::stod(s, &used);
        } catch (const std::exception&) {
            fail("expected a number, got '" + s + "'");
        }
        if (used != s.size()) fail("expected a number, got '" + s + "'");
        return v;
    }

    std::string key_;
    std::string value_;
    std::string where_;
};

void require(bool ok, const char* field, const std::string& what) {
    if (!ok) throw ConfigError(std::string("field '") + field + "': " + what);
}

} // namespace

Mode parse_mode(const std::string& name) {
    if (name == "design") return Mode::Design;
    if (name == "ser-sweep") return Mode::SerSweep;
    if (name == "kl-check") return Mode::KlCheck;
    if (name == "pack-unitary") return Mode::PackUnitary;
    throw ConfigError("field 'mode': unknown mode '" + name + "'");
}

const char* mode_name(Mode mode) {
    switch (mode) {
    case Mode::Design: return "design";
    case Mode::SerSweep: return "ser-sweep";
    case Mode::KlCheck: return "kl-check";
    case Mode::PackUnitary: return "pack-unitary";
    }
    return "?";
}

ExperimentConfig parse_config(std::istream& is, const std::string& source, std::optional<Mode> mode_hint,
                              const std::filesystem::path& base_dir) {
    ExperimentConfig cfg;
    std::set<std::string> seen;
    std::optional<Mode> file_mode;
    int line_no = 0;
    for (std::string line; std::getline(is, line);) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        const std::string where = source + ":" + std::to_string(line_no);
        if (eq == std::string::npos) throw ConfigError(where + ": expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const Field f(key, trim(line.substr(eq + 1)), where);
        if (f.text().empty()) f.fail("missing value");
        if (!seen.insert(key).second) f.fail("given more than once");

        if (key == "mode") {
            file_mode = parse_mode(f.text());
        } else if (key == "K") {
            cfg.K = static_cast<int>(f.integer());
        } else if (key == "M") {
            cfg.M = static_cast<int>(f.integer());
        } else if (key == "l_s") {
            cfg.l_s = static_cast<int>(f.integer());
        } else if (key == "snr_db") {
            cfg.snr_db_list = f.reals();
        } else if (key == "trials") {
            const auto v = f.integer();
            if (v < 1) f.fail("must be >= 1");
            cfg.trials = static_cast<std::uint64_t>(v);
        } else if (key == "seed") {
            const auto v = f.integer();
            if (v < 0) f.fail("must be nonnegative");
            cfg.seed = static_cast<std::uint64_t>(v);
        } else if (key == "output") {
            cfg.output_path = f.text();
        } else if (key.rfind("unitary_library.", 0) == 0) {
            const Field idx(key, key.substr(16), where);
            const auto l_v = idx.integer();
            if (l_v < 0 || l_v > 30) f.fail("l_v out of range");
            std::filesystem::path p = f.text();
            if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
            if (!std::filesystem::exists(p)) f.fail("file does not exist: " + p.string());
            cfg.unitary_library_paths[static_cast<int>(l_v)] = p;
        } else if (key == "schemes") {
            cfg.schemes = f.list();
            for (const auto& s : cfg.schemes) {
                if (s != "multilevel" && s != "unitary" && s != "pilot-qam") f.fail("unknown scheme '" + s + "'");
            }
        } else if (key == "pairs") {
            cfg.pairs = static_cast<int>(f.integer());
        } else if (key == "l_v") {
            cfg.l_v = static_cast<int>(f.integer());
        } else if (key == "restarts") {
            cfg.restarts = static_cast<int>(f.integer());
        } else if (key == "iterations") {
            cfg.iterations = static_cast<int>(f.integer());
        } else if (key == "smoothing") {
            cfg.smoothing = f.real();
        } else if (key == "workers") {
            const auto v = f.integer();
            if (v < 0) f.fail("must be nonnegative");
            cfg.workers = static_cast<unsigned>(v);
        } else {
            f.fail("unknown key");
        }
    }

    if (file_mode && mode_hint && *file_mode != *mode_hint) {
        throw ConfigError(std::string("field 'mode': config says '") + mode_name(*file_mode) +
                          "' but the command line asks for '" + mode_name(*mode_hint) + "'");
    }
    if (!file_mode && !mode_hint) throw ConfigError("field 'mode': missing");
    cfg.mode = file_mode ? *file_mode : *mode_hint;
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path, std::optional<Mode> mode_hint) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open config file " + path.string());
    return parse_config(is, path.string(), mode_hint, path.parent_path());
}

void ExperimentConfig::validate() const {
    require(K >= 1, "K", "missing or < 1");
    require(restarts >= 1, "restarts", "must be >= 1");
    require(iterations >= 1, "iterations", "must be >= 1");
    require(smoothing > 0.0, "smoothing", "must be positive");
    require(!output_path.empty(), "output", "missing (set it in the config or pass --out)");
    switch (mode) {
    case Mode::Design:
        require(l_s >= 1, "l_s", "missing or < 1");
        require(!snr_db_list.empty(), "snr_db", "missing or empty");
        break;
    case Mode::SerSweep:
        require(l_s >= 1, "l_s", "missing or < 1");
        require(M >= 1, "M", "missing or < 1");
        require(!snr_db_list.empty(), "snr_db", "missing or empty");
        require(trials >= 1, "trials", "missing");
        require(!schemes.empty(), "schemes", "empty");
        break;
    case Mode::KlCheck:
        require(M >= 1, "M", "missing or < 1");
        require(!snr_db_list.empty(), "snr_db", "missing or empty");
        require(trials >= 1, "trials", "missing");
        require(pairs >= 1, "pairs", "must be >= 1");
        break;
    case Mode::PackUnitary:
        require(l_v >= 0 && l_v <= 16, "l_v", "must be in 0..16");
        break;
    }
    for (const auto& [l_v_key, path] : unitary_library_paths) {
        require(mode == Mode::PackUnitary || l_v_key <= l_s, "unitary_library", "entry beyond l_s");
    }
}

} // namespace klconst
