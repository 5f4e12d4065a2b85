// Aggregated verification checks behind `fshe verify`: kernel identities,
// covariance closed forms, the simplex-integral oracle, series sandwiches,
// the Stirling-type bound, the scaling integral, and the kernel-integral
// estimates. Each check reports PASS/FAIL with its worst-case margin
// (margin >= 0 means the threshold held, with that much room).
#pragma once

#include <string>
#include <vector>

#include "fshe/config.hpp"
#include "fshe/spectral.hpp"

namespace fshe::verify {

struct CheckResult {
    std::string check;
    bool pass = false;
    double margin = 0.0;
    std::string detail;
};

// Kernel identity checks for a given basis (symmetry, sub-Markov mass,
// Chapman-Kolmogorov -- anchored against the exact image-charge kernel when
// alpha = 2 -- orthonormality, eigenvalue growth, phi_1 comparison,
// truncation positivity).
std::vector<CheckResult> kernel_checks(const spectral::SpectralBasis& basis);

// Envelope fits: gaussian-exact + riah (alpha = 2 basis), chenkim +
// free-stable (alpha < 2 basis), the short-range lower bound and the
// interior mass lower bound.
std::vector<CheckResult> envelope_checks(const spectral::SpectralBasis& alpha2,
                                         const spectral::SpectralBasis& stable);

std::vector<CheckResult> covariance_checks();
std::vector<CheckResult> noise_checks();
std::vector<CheckResult> simplex_checks();
std::vector<CheckResult> series_checks();
std::vector<CheckResult> timsc_checks();
std::vector<CheckResult> kernel_integral_checks(const spectral::SpectralBasis& basis);
std::vector<CheckResult> gronwall_checks(const spectral::SpectralBasis& basis);

// Everything, in a fixed order (the `verify` subcommand output).
std::vector<CheckResult> run_all(const config::ExperimentConfig& cfg);

std::string to_json(const std::vector<CheckResult>& checks, const std::string& config_hash,
                    std::uint64_t seed);

}  // namespace fshe::verify
