#ifndef DIRAC6C_CLI_HPP
#define DIRAC6C_CLI_HPP

#include "dirac6c/harness.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace dirac6c {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitNumerical = 2;

inline constexpr int kCsvSchemaVersion = 1;
/// Fixed column order of every record CSV.
inline constexpr char const *kCsvHeader =
    "scheme,h,tau,epsilon,t_final,e_phi,e_rho,e_J,mass_drift,wall_time,rate";

/// Scientific notation with 17 significant digits; "nan" for NaN.
std::string format_real(double v);

/// `#`-prefixed metadata block followed by the header and one row per record.
void write_records_csv(std::ostream &os, std::vector<std::string> const &metadata,
                       std::vector<ErrorRecord> const &records);

/// Table layout of a sweep: one row per epsilon, one column per tau, then
/// the column maxima and rate rows.
void write_sweep_table(std::ostream &os, std::vector<std::string> const &metadata,
                       SweepResult const &result);

/// Log-log plot of e_phi (and e_rho, e_J) against the named x column with
/// guide lines of slope 2, 4 and 6.
void write_gnuplot_script(std::ostream &os, std::string const &csv_path,
                          std::string const &x_column, std::string const &title);

/// Entry point of the command-line tool. Data goes to `out`, diagnostics
/// to `err`; returns the process exit code.
int run_cli(int argc, char const *const *argv, std::ostream &out, std::ostream &err);

} // namespace dirac6c

#endif
