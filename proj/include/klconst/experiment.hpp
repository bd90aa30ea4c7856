#pragma once

#include <iosfwd>
#include <string>

#include "klconst/config.hpp"
#include "klconst/link_sim.hpp"
#include "klconst/multilevel.hpp"
#include "klconst/unitary.hpp"

namespace klconst {

enum ExitCode : int { kExitOk = 0, kExitConfig = 2, kExitNumeric = 3 };

// "%.10g"
std::string format_csv(double x);

// Allocation table rows "l_alpha,min_kl,r0,alpha0", each prefixed by `prefix`
// (e.g. "10,0.05,") when non-empty.
void write_allocation_rows(std::ostream& os, const DesignOutcome& outcome, const std::string& prefix = {});

inline constexpr const char* kSerCsvHeader = "scheme,K,M,l_s,l_alpha,snr_db,ser,ci_low,ci_high,trials,seed";

// One SER row; l_alpha < 0 leaves that column empty.
void write_ser_row(std::ostream& os, const std::string& scheme, int K, int M, int l_s, int l_alpha, double snr_db,
                   const SerEstimate& est);

// Loads the configured codebooks and packs the rest (l_v = 0..l_s).
UnitaryLibrary resolve_library(const ExperimentConfig& cfg);

// Runs one experiment; diagnostics go to `log`. Returns kExitOk, kExitConfig
// or kExitNumeric.
int run(const ExperimentConfig& cfg, std::ostream& log);

} // namespace klconst
