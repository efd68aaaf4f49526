#pragma once

#include <iosfwd>
#include <string>

#include "twm/green_function.hpp"
#include "twm/sweep.hpp"

namespace twm {

inline constexpr int kGfFormatVersion = 1;

// One row per record: beta_r, beta_s, beta_p, length, gamma_bar_re,
// gamma_bar_im, tau_p, rho_1..rho_N, ce_1..ce_N, selectivity,
// separability, error. 12 significant digits.
void write_csv(const SweepResult& result, std::ostream& out);

std::string to_json_text(const SweepResult& result);
SweepResult sweep_result_from_json_text(const std::string& text);

// Writes `result` as csv or json; throws Error on I/O failure.
void export_result(const SweepResult& result, const std::string& format, const std::string& path);

// Configuration file (JSON). Unknown keys are rejected.
SweepSpec spec_from_json_text(const std::string& text);
std::string spec_to_json_text(const SweepSpec& spec);
SweepSpec load_config(const std::string& path);

// Green-function container: a text header of key=value lines ending in
// "end", then every present block as row-major little-endian float64
// (re, im) pairs in the order rr, rs, sr, ss.
void save_gf(const GreenFunction& gf, std::ostream& out);
GreenFunction load_gf(std::istream& in);
void save_gf(const GreenFunction& gf, const std::string& path);
GreenFunction load_gf(const std::string& path);

std::string read_file(const std::string& path);

}  // namespace twm
