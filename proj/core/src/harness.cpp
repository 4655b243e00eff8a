#include "nfv/harness.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>

#include "nfv/error.hpp"

namespace nfv {

std::vector<std::size_t> doubling_ladder(std::size_t first, std::size_t last) {
  if (first == 0 || last < first) {
    throw ConfigError("ladder needs 0 < first <= last");
  }
  std::vector<std::size_t> out;
  for (std::size_t n = first; n <= last; n *= 2) {
    out.push_back(n);
  }
  return out;
}

std::optional<double> convergence_rate(double coarse, double fine) {
  if (!(coarse > 0.0) || !(fine > 0.0) || !std::isfinite(coarse) || !std::isfinite(fine)) {
    return std::nullopt;
  }
  return std::log2(coarse / fine);
}

namespace {

SuiteVerdict monitored(const RunMonitor& monitor, const RunResult& result,
                       const FluxModel& flux) {
  return check_theorem_suite(result.records, monitor.report(result.records), flux);
}

void run_rung(const StudySpec& spec, StudyRow& row) {
  const Preset& p = spec.preset;
  const Grid2D grid = Grid2D::square(row.n, p.lo, p.hi);
  const EncryptionProblem problem(p.model, grid, spec.convolution);
  const Field initial = project_initial_data(p.profile, 1, grid);

  SchemeConfig config;
  config.flux = row.flux;
  config.cfl_factor = spec.cfl_factor;
  config.convolution = spec.convolution;

  RunOptions options;
  options.observe_every = spec.observe_every;
  if (!spec.diagnostics) {
    const Field encrypted = problem.encrypt(initial, config, p.horizon, options).final;
    const Field decrypted = problem.decrypt(encrypted, config, p.horizon, options).final;
    row.error = reconstruction_error(decrypted, initial)[0];
    return;
  }

  config.t_end = p.horizon;
  RunMonitor forward(initial, config, problem.flux(), problem.convolver());
  options.observer = forward.observer();
  const RunResult encrypted = problem.encrypt(initial, config, p.horizon, options);
  row.encrypt_verdict = monitored(forward, encrypted, problem.flux());

  config.direction = TimeDirection::reversed;
  RunMonitor backward(encrypted.final, config, problem.flux(), problem.convolver());
  options.observer = backward.observer();
  const RunResult decrypted = problem.decrypt(encrypted.final, config, p.horizon, options);
  row.decrypt_verdict = monitored(backward, decrypted, problem.flux());
  row.error = reconstruction_error(decrypted.final, initial)[0];
}

}  // namespace

std::vector<StudyRow> run_study(const StudySpec& spec) {
  if (spec.ladder.empty() || spec.fluxes.empty()) {
    throw ConfigError("study needs at least one grid size and one flux");
  }
  std::vector<StudyRow> rows;
  for (const NumericalFluxChoice& flux : spec.fluxes) {
    const std::size_t first = rows.size();
    for (std::size_t n : spec.ladder) {
      StudyRow row;
      row.n = n;
      row.flux = flux;
      try {
        run_rung(spec, row);
      } catch (const std::exception& e) {
        row.failure = e.what();
      }
      if (rows.size() > first && row.error && rows.back().error) {
        row.rate = convergence_rate(*rows.back().error, *row.error);
      }
      rows.push_back(std::move(row));
      if (spec.progress) {
        spec.progress(n, flux.variant);
      }
    }
  }
  return rows;
}

void write_study_csv(std::ostream& out, const std::vector<StudyRow>& rows) {
  out << "N,variant,error,rate\n";
  out.precision(std::numeric_limits<double>::max_digits10);
  for (const StudyRow& r : rows) {
    out << r.n << ',' << to_string(r.flux.variant) << ',';
    if (r.error) {
      out << *r.error;
    }
    out << ',';
    if (r.rate) {
      out << *r.rate;
    }
    out << '\n';
  }
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    cells.push_back(cell);
  }
  if (!line.empty() && line.back() == ',') {
    cells.emplace_back();
  }
  return cells;
}

double parse_number(const std::string& s, std::size_t line_no) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) {
      throw std::invalid_argument(s);
    }
    return v;
  } catch (const std::exception&) {
    throw InputError("golden line " + std::to_string(line_no) + ": bad number '" + s + "'");
  }
}

}  // namespace

std::vector<GoldenEntry> read_golden(std::istream& in) {
  std::vector<GoldenEntry> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') {
      line.pop_back();
    }
    if (line.empty() || line.front() == '#' || line.rfind("N,", 0) == 0) {
      continue;
    }
    const auto cells = split_csv(line);
    if (cells.size() != 4) {
      throw InputError("golden line " + std::to_string(line_no) + ": expected 4 columns");
    }
    GoldenEntry e;
    e.n = static_cast<std::size_t>(parse_number(cells[0], line_no));
    e.variant = cells[1];
    e.error = parse_number(cells[2], line_no);
    if (!cells[3].empty()) {
      e.rate = parse_number(cells[3], line_no);
    }
    out.push_back(std::move(e));
  }
  return out;
}

std::vector<GoldenEntry> read_golden_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw InputError("cannot open golden file '" + path + "'");
  }
  return read_golden(in);
}

std::vector<std::string> compare_golden(const std::vector<StudyRow>& rows,
                                        const std::vector<GoldenEntry>& golden,
                                        const GoldenTolerance& tol) {
  std::vector<std::string> diff;
  for (const StudyRow& r : rows) {
    const std::string variant(to_string(r.flux.variant));
    std::ostringstream where;
    where << "(N=" << r.n << ", " << variant << ")";
    const GoldenEntry* match = nullptr;
    for (const GoldenEntry& g : golden) {
      if (g.n == r.n && g.variant == variant) {
        match = &g;
      }
    }
    if (match == nullptr) {
      diff.push_back(where.str() + ": missing golden entry");
      continue;
    }
    if (!r.error) {
      diff.push_back(where.str() + ": no error computed" +
                     (r.failure.empty() ? std::string() : " (" + r.failure + ")"));
      continue;
    }
    const double rel = std::abs(*r.error - match->error) / std::abs(match->error);
    if (!(rel <= tol.error_relative)) {
      std::ostringstream m;
      m << where.str() << ": error " << *r.error << " vs golden " << match->error
        << " (relative deviation " << rel << ")";
      diff.push_back(m.str());
    }
    if (match->rate) {
      if (!r.rate) {
        diff.push_back(where.str() + ": rate undefined, golden has one");
      } else if (!(std::abs(*r.rate - *match->rate) <= tol.rate_absolute)) {
        std::ostringstream m;
        m << where.str() << ": rate " << *r.rate << " vs golden " << *match->rate;
        diff.push_back(m.str());
      }
    }
  }
  return diff;
}

}  // namespace nfv
