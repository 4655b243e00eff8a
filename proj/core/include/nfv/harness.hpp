#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "nfv/diagnostics.hpp"
#include "nfv/flux.hpp"
#include "nfv/models.hpp"

namespace nfv {

/// {first, 2 first, 4 first, ...} up to and including `last`.
std::vector<std::size_t> doubling_ladder(std::size_t first, std::size_t last);

/// log2(coarse / fine); empty unless both errors are positive and finite.
std::optional<double> convergence_rate(double coarse, double fine);

struct StudySpec {
  Preset preset;
  std::vector<std::size_t> ladder;
  std::vector<NumericalFluxChoice> fluxes;
  double cfl_factor = 1.0;
  ConvolutionMethod convolution = ConvolutionMethod::automatic;
  /// evaluate the theorem suite on both runs of every rung
  bool diagnostics = false;
  std::size_t observe_every = 0;
  /// called after each finished rung
  std::function<void(std::size_t N, FluxVariant variant)> progress;
};

struct StudyRow {
  std::size_t n = 0;
  NumericalFluxChoice flux;
  std::optional<double> error;
  std::optional<double> rate;
  std::string failure;  // empty when the rung succeeded
  std::optional<SuiteVerdict> encrypt_verdict;
  std::optional<SuiteVerdict> decrypt_verdict;
};

/// Rows ordered by flux, then N. A failing rung is recorded and the study
/// continues.
std::vector<StudyRow> run_study(const StudySpec& spec);

/// `N,variant,error,rate`; undefined values are left empty.
void write_study_csv(std::ostream& out, const std::vector<StudyRow>& rows);

struct GoldenEntry {
  std::size_t n = 0;
  std::string variant;
  double error = 0.0;
  std::optional<double> rate;
};

/// Reads `N,variant,error,rate` rows; lines starting with '#' and the header
/// are skipped. Throws InputError on a malformed row.
std::vector<GoldenEntry> read_golden(std::istream& in);
std::vector<GoldenEntry> read_golden_file(const std::string& path);

struct GoldenTolerance {
  double error_relative = 0.10;
  double rate_absolute = 0.06;
};

/// One line per out-of-tolerance or missing entry, naming (N, variant).
/// Only rows present in the table are compared.
std::vector<std::string> compare_golden(const std::vector<StudyRow>& rows,
                                        const std::vector<GoldenEntry>& golden,
                                        const GoldenTolerance& tol = {});

}  // namespace nfv
