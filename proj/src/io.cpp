#include "klconst/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <vector>

#include "klconst/errors.hpp"

namespace klconst {

namespace {

constexpr double kLoadNormTol = 1e-6;

class LineReader {
public:
    LineReader(std::istream& is, std::string source) : is_(is), source_(std::move(source)) {}

    // Next non-blank, non-comment line split into tokens.
    std::vector<std::string> next(const char* expecting) {
        std::string line;
        while (std::getline(is_, line)) {
            ++line_no_;
            const auto first = line.find_first_not_of(" \t\r");
            if (first == std::string::npos || line[first] == '#') continue;
            std::istringstream ss(line);
            std::vector<std::string> tokens;
            for (std::string tok; ss >> tok;) tokens.push_back(tok);
            return tokens;
        }
        fail(std::string("unexpected end of file, expected ") + expecting);
    }

    // Fails if anything other than blank lines and comments remains.
    void expect_end() {
        std::string line;
        while (std::getline(is_, line)) {
            ++line_no_;
            const auto first = line.find_first_not_of(" \t\r");
            if (first == std::string::npos || line[first] == '#') continue;
            fail("trailing data after the last record");
        }
    }

    [[noreturn]] void fail(const std::string& what) const { throw LoadError(source_, line_no_, what); }

    double number(const std::string& tok) const {
        std::size_t used = 0;
        double v = 0;
        try {
            v = std::stod(tok, &used);
        } catch (const std::exception&) {
            fail("not a number: '" + tok + "'");
        }
        if (used != tok.size() || !std::isfinite(v)) fail("not a finite number: '" + tok + "'");
        return v;
    }

    long integer(const std::string& tok) const {
        std::size_t used = 0;
        long v = 0;
        try {
            v = std::stol(tok, &used);
        } catch (const std::exception&) {
            fail("not an integer: '" + tok + "'");
        }
        if (used != tok.size()) fail("not an integer: '" + tok + "'");
        return v;
    }

    int line() const { return line_no_; }

private:
    std::istream& is_;
    std::string source_;
    int line_no_ = 0;
};

void write_vector(std::ostream& os, const CVector& v) {
    for (Eigen::Index j = 0; j < v.size(); ++j) {
        if (j) os << ' ';
        os << format_exact(v(j).real()) << ' ' << format_exact(v(j).imag());
    }
    os << '\n';
}

CVector read_vector(LineReader& in, int K) {
    const auto tok = in.next("a direction vector");
    if (tok.size() != static_cast<std::size_t>(2 * K)) {
        in.fail("expected " + std::to_string(2 * K) + " numbers, got " + std::to_string(tok.size()));
    }
    CVector v(K);
    for (int j = 0; j < K; ++j) v(j) = cdouble(in.number(tok[2 * j]), in.number(tok[2 * j + 1]));
    const double norm = v.norm();
    if (std::abs(norm - 1.0) > kLoadNormTol) {
        in.fail("vector norm " + format_exact(norm) + " is not 1");
    }
    if (std::abs(norm - 1.0) > kUnitNormTol) v /= norm;
    return v;
}

long positive(LineReader& in, const std::string& tok, const char* field) {
    const long v = in.integer(tok);
    if (v < 1) in.fail(std::string(field) + " must be positive");
    return v;
}

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
    return os;
}

std::ifstream open_in(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw LoadError(path.string(), 0, "cannot open file");
    return is;
}

} // namespace

std::string format_exact(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void write_unitary(std::ostream& os, const UnitarySet& set) {
    os << set.K() << ' ' << set.size() << '\n';
    for (const auto& v : set.vectors()) write_vector(os, v);
}

UnitarySet read_unitary(std::istream& is, const std::string& source) {
    LineReader in(is, source);
    const auto header = in.next("header 'K N'");
    if (header.size() != 2) in.fail("header must be 'K N'");
    const int K = static_cast<int>(positive(in, header[0], "K"));
    const long n = positive(in, header[1], "N");
    if (!is_power_of_two(static_cast<std::size_t>(n))) in.fail("N must be a power of two");
    std::vector<CVector> vectors;
    vectors.reserve(static_cast<std::size_t>(n));
    for (long i = 0; i < n; ++i) vectors.push_back(read_vector(in, K));
    in.expect_end();
    return UnitarySet(K, std::move(vectors));
}

void save_unitary(const UnitarySet& set, const std::filesystem::path& path) {
    auto os = open_out(path);
    write_unitary(os, set);
}

UnitarySet load_unitary(const std::filesystem::path& path) {
    auto is = open_in(path);
    return read_unitary(is, path.string());
}

void write_constellation(std::ostream& os, const MultiLevelConstellation& c) {
    os << c.K() << ' ' << c.levels().size() << ' ' << c.directions().size() << ' '
       << format_exact(c.sigma2_design()) << '\n';
    for (double a : c.levels().amplitudes()) os << format_exact(a) << '\n';
    for (const auto& v : c.directions().vectors()) write_vector(os, v);
}

MultiLevelConstellation read_constellation(std::istream& is, const std::string& source) {
    LineReader in(is, source);
    const auto header = in.next("header 'K N_levels N_directions sigma2_design'");
    if (header.size() != 4) in.fail("header must be 'K N_levels N_directions sigma2_design'");
    const int K = static_cast<int>(positive(in, header[0], "K"));
    const long n_levels = positive(in, header[1], "N_levels");
    const long n_dirs = positive(in, header[2], "N_directions");
    const double sigma2 = in.number(header[3]);
    if (!(sigma2 > 0.0)) in.fail("sigma2_design must be positive");
    if (!is_power_of_two(static_cast<std::size_t>(n_levels))) in.fail("N_levels must be a power of two");
    if (!is_power_of_two(static_cast<std::size_t>(n_dirs))) in.fail("N_directions must be a power of two");

    std::vector<double> amps;
    for (long i = 0; i < n_levels; ++i) {
        const auto tok = in.next("an amplitude");
        if (tok.size() != 1) in.fail("expected a single amplitude");
        amps.push_back(in.number(tok[0]));
    }
    const int amps_line = in.line();

    std::optional<double> ratio;
    if (amps.size() > 1) {
        const double base = sigma2 + amps[0] * amps[0];
        const double r = (sigma2 + amps[1] * amps[1]) / base;
        bool chain = r > 1.0;
        for (std::size_t i = 2; chain && i < amps.size(); ++i) {
            const double want = base * std::pow(r, static_cast<double>(i));
            chain = std::abs(sigma2 + amps[i] * amps[i] - want) <= 1e-9 * want;
        }
        if (chain) ratio = r;
    }
    std::optional<LevelSet> levels;
    try {
        levels.emplace(std::move(amps), ratio, sigma2);
    } catch (const InvalidArgument& e) {
        throw LoadError(source, amps_line, e.what());
    }

    std::vector<CVector> vectors;
    for (long i = 0; i < n_dirs; ++i) vectors.push_back(read_vector(in, K));
    in.expect_end();
    return MultiLevelConstellation(std::move(*levels), UnitarySet(K, std::move(vectors)));
}

void save_constellation(const MultiLevelConstellation& c, const std::filesystem::path& path) {
    auto os = open_out(path);
    write_constellation(os, c);
}

MultiLevelConstellation load_constellation(const std::filesystem::path& path) {
    auto is = open_in(path);
    return read_constellation(is, path.string());
}

} // namespace klconst
