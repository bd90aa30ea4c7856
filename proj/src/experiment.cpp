#include "klconst/experiment.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>

#include "klconst/errors.hpp"
#include "klconst/io.hpp"
#include "klconst/kl.hpp"
#include "klconst/rng.hpp"

namespace klconst {

namespace {

std::ofstream open_csv(const std::filesystem::path& path) {
    std::ofstream os(path);
    if (!os) throw ConfigError("field 'output': cannot write " + path.string());
    return os;
}

PackingConfig packing_from(const ExperimentConfig& cfg) {
    PackingConfig p;
    p.K = cfg.K;
    p.restarts = cfg.restarts;
    p.iterations = cfg.iterations;
    p.smoothing = cfg.smoothing;
    p.seed = cfg.seed;
    return p;
}

// Sibling path "<stem>_<tag><ext>" next to the main output.
std::filesystem::path sibling(const std::filesystem::path& out, const std::string& tag, const std::string& ext) {
    return out.parent_path() / (out.stem().string() + "_" + tag + ext);
}

std::string snr_tag(double snr_db) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "snr%g", snr_db);
    return buf;
}

void run_design(const ExperimentConfig& cfg, std::ostream& log) {
    const UnitaryLibrary lib = resolve_library(cfg);
    auto os = open_csv(cfg.output_path);
    os << "snr_db,sigma2,l_alpha,min_kl,r0,alpha0,selected\n";
    for (double snr_db : cfg.snr_db_list) {
        const double sigma2 = snr_db_to_sigma2(cfg.K, snr_db);
        const DesignOutcome d = allocate_bits(cfg.l_s, sigma2, lib);
        for (const auto& row : d.table) {
            os << format_csv(snr_db) << ',' << format_csv(sigma2) << ',' << row.l_alpha << ','
               << format_csv(row.min_kl) << ',' << format_csv(row.r0) << ',' << format_csv(row.alpha0) << ','
               << (row.l_alpha == d.l_alpha ? 1 : 0) << '\n';
        }
        const auto path = sibling(cfg.output_path, snr_tag(snr_db), ".const");
        save_constellation(d.constellation, path);
        log << "snr " << snr_db << " dB: l_alpha=" << d.l_alpha << " min_kl=" << format_csv(d.min_kl) << " -> "
            << path.string() << '\n';
    }
}

void run_ser_sweep(const ExperimentConfig& cfg, std::ostream& log) {
    const UnitaryLibrary lib = resolve_library(cfg);
    std::optional<PilotQamScheme> pilot;
    for (const auto& s : cfg.schemes) {
        if (s != "pilot-qam") continue;
        if (cfg.K < 2 || cfg.l_s % (cfg.K - 1) != 0) {
            throw ConfigError("field 'schemes': pilot-qam needs K >= 2 and l_s divisible by K-1");
        }
        try {
            pilot.emplace(cfg.K, cfg.l_s / (cfg.K - 1));
        } catch (const InvalidArgument& e) {
            throw ConfigError(std::string("field 'schemes': pilot-qam: ") + e.what());
        }
    }

    auto os = open_csv(cfg.output_path);
    os << kSerCsvHeader << '\n';
    for (double snr_db : cfg.snr_db_list) {
        const ChannelParams params = ChannelParams::from_snr_db(cfg.M, cfg.K, snr_db);
        for (const auto& scheme : cfg.schemes) {
            SerEstimate est;
            int l_alpha = -1;
            if (scheme == "multilevel") {
                const DesignOutcome d = allocate_bits(cfg.l_s, params.sigma2, lib);
                l_alpha = d.l_alpha;
                est = estimate_ser(d.constellation, params, cfg.trials, cfg.seed, cfg.workers);
            } else if (scheme == "unitary") {
                const FixedDesign d = design_fixed(params.sigma2, 0, lib.at(cfg.l_s));
                l_alpha = 0;
                est = estimate_ser(d.constellation, params, cfg.trials, cfg.seed, cfg.workers);
            } else {
                est = pilot_qam_run(*pilot, params, cfg.trials, cfg.seed, cfg.workers);
            }
            write_ser_row(os, scheme, cfg.K, cfg.M, cfg.l_s, l_alpha, snr_db, est);
            log << scheme << " @ " << snr_db << " dB: ser=" << format_csv(est.ser) << '\n';
        }
    }
}

void run_kl_check(const ExperimentConfig& cfg, std::ostream& log) {
    auto os = open_csv(cfg.output_path);
    os << "pair,snr_db,kl_closed,kl_mc,std_error,z_score\n";
    int within = 0;
    int total = 0;
    for (double snr_db : cfg.snr_db_list) {
        const ChannelParams params = ChannelParams::from_snr_db(cfg.M, cfg.K, snr_db);
        for (int p = 0; p < cfg.pairs; ++p) {
            // Point draws use substreams far above the Monte-Carlo ones.
            PhiloxStream rng(cfg.seed, (std::uint64_t{1} << 62) + static_cast<std::uint64_t>(p));
            const auto draw = [&] {
                CVector v(cfg.K);
                for (int j = 0; j < cfg.K; ++j) v(j) = rng.complex_normal();
                v.normalize();
                return SignalPoint(std::sqrt(0.2 + 1.8 * rng.uniform()), v);
            };
            const SignalPoint s_i = draw();
            const SignalPoint s_k = draw();
            const double closed = kl_full(s_i, s_k, params.sigma2);
            const KlMcEstimate mc =
                kl_mc_estimate(s_i, s_k, params, cfg.trials, cfg.seed + static_cast<std::uint64_t>(p), cfg.workers);
            const double z = mc.std_error > 0 ? (mc.mean - closed) / mc.std_error : 0.0;
            os << p << ',' << format_csv(snr_db) << ',' << format_csv(closed) << ',' << format_csv(mc.mean) << ','
               << format_csv(mc.std_error) << ',' << format_csv(z) << '\n';
            within += std::abs(z) <= 3.0;
            ++total;
        }
    }
    log << within << "/" << total << " pairs within 3 standard errors\n";
}

void run_pack_unitary(const ExperimentConfig& cfg, std::ostream& log) {
    PackingConfig p = packing_from(cfg);
    p.cardinality = std::size_t{1} << cfg.l_v;
    const PackingReport report = pack_unitary(p);
    save_unitary(report.best, cfg.output_path);
    log << "K=" << cfg.K << " N=" << p.cardinality << " t_v=" << format_csv(report.best.t_v())
        << " welch_limit=" << format_csv(welch_limit(cfg.K, p.cardinality)) << '\n';
}

} // namespace

std::string format_csv(double x) {
    if (std::isnan(x)) return "nan";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", x);
    return buf;
}

void write_allocation_rows(std::ostream& os, const DesignOutcome& outcome, const std::string& prefix) {
    for (const auto& row : outcome.table) {
        os << prefix << row.l_alpha << ',' << format_csv(row.min_kl) << ',' << format_csv(row.r0) << ','
           << format_csv(row.alpha0) << '\n';
    }
}

void write_ser_row(std::ostream& os, const std::string& scheme, int K, int M, int l_s, int l_alpha, double snr_db,
                   const SerEstimate& est) {
    os << scheme << ',' << K << ',' << M << ',' << l_s << ',';
    if (l_alpha >= 0) os << l_alpha;
    os << ',' << format_csv(snr_db) << ',' << format_csv(est.ser) << ',' << format_csv(est.ci95_low) << ','
       << format_csv(est.ci95_high) << ',' << est.trials << ',' << est.seed << '\n';
}

UnitaryLibrary resolve_library(const ExperimentConfig& cfg) {
    UnitaryLibrary lib;
    for (const auto& [l_v, path] : cfg.unitary_library_paths) {
        UnitarySet set = load_unitary(path);
        if (set.K() != cfg.K || set.size() != (std::size_t{1} << l_v)) {
            throw ConfigError("field 'unitary_library." + std::to_string(l_v) + "': " + path.string() +
                              " holds " + std::to_string(set.size()) + " vectors of length " +
                              std::to_string(set.K()));
        }
        lib.emplace(l_v, std::move(set));
    }
    const UnitaryLibrary packed = [&] {
        PackingConfig p = packing_from(cfg);
        UnitaryLibrary out;
        out.emplace(0, UnitarySet::single(cfg.K));
        for (int l_v = 1; l_v <= cfg.l_s; ++l_v) {
            if (lib.count(l_v)) continue;
            p.cardinality = std::size_t{1} << l_v;
            p.seed = cfg.seed + static_cast<std::uint64_t>(l_v);
            out.emplace(l_v, optimize_unitary(p));
        }
        return out;
    }();
    for (const auto& [l_v, set] : packed) lib.emplace(l_v, set);
    return lib;
}

int run(const ExperimentConfig& cfg, std::ostream& log) {
    try {
        cfg.validate();
        switch (cfg.mode) {
        case Mode::Design: run_design(cfg, log); break;
        case Mode::SerSweep: run_ser_sweep(cfg, log); break;
        case Mode::KlCheck: run_kl_check(cfg, log); break;
        case Mode::PackUnitary: run_pack_unitary(cfg, log); break;
        }
    } catch (const ConfigError& e) {
        log << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const LoadError& e) {
        log << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const InvalidArgument& e) {
        log << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const NumericError& e) {
        log << "numeric failure: " << e.what() << '\n';
        return kExitNumeric;
    } catch (const DomainError& e) {
        log << "numeric failure: " << e.what() << '\n';
        return kExitNumeric;
    }
    return kExitOk;
}

} // namespace klconst
