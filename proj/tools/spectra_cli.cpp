#include "spectra_cli.hpp"

#include <chrono>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <memory>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "kfspectra/kfspectra.hpp"

namespace kfspectra::cli {
namespace {

constexpr int exit_ok = 0;
constexpr int exit_check_failed = 1;
constexpr int exit_usage = 2;

struct ProblemOptions {
  double A = 1.0;
  double B = 0.0;
  int l = 0;
  int levels = 1;
  std::string sweep;
};

struct OracleOptions {
  std::optional<double> R;
  std::optional<std::size_t> M;
  std::optional<std::size_t> N_b;
  std::optional<double> lambda, mu, nu;
};

struct OutputOptions {
  std::string format = "csv";
  std::string output;
  bool stamp = false;
};

void add_problem_options(CLI::App *cmd, ProblemOptions &o, bool with_levels) {
  cmd->add_option("--A,--coulomb-strength", o.A, "coefficient A of -A/r")
      ->capture_default_str();
  cmd->add_option("--B,--inverse-square-strength", o.B,
                  "coefficient B of B/r^2")
      ->capture_default_str();
  cmd->add_option("--l,--angular-momentum", o.l, "angular momentum l")
      ->capture_default_str();
  if (with_levels) {
    cmd->add_option("--levels", o.levels, "number of levels, n = 0..levels-1")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    cmd->add_option("--sweep", o.sweep,
                    "sweep file: lines 'A B l n_max [key=value]' or JSON");
  }
}

void add_oracle_options(CLI::App *cmd, OracleOptions &o) {
  cmd->add_option("--R,--box-radius", o.R, "finite-difference box radius");
  cmd->add_option("--M,--grid-points", o.M, "finite-difference interior points");
  cmd->add_option("--Nb,--basis-size", o.N_b, "Laguerre basis size");
  cmd->add_option("--lambda", o.lambda, "Laguerre basis scale");
  cmd->add_option("--mu", o.mu, "Laguerre basis exponent (> 1/2)");
  cmd->add_option("--nu", o.nu, "Laguerre order (> -1)");
}

void add_output_options(CLI::App *cmd, OutputOptions &o) {
  cmd->add_option("--format", o.format, "csv or json")
      ->capture_default_str()
      ->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("-o,--output", o.output, "write to file instead of stdout");
  cmd->add_flag("--stamp", o.stamp, "add a metadata header with a timestamp");
}

OracleSettings apply(const OracleOptions &o, OracleSettings s) {
  SweepRecord rec;
  rec.R = o.R;
  rec.M = o.M;
  rec.N_b = o.N_b;
  rec.lambda = o.lambda;
  rec.mu = o.mu;
  rec.nu = o.nu;
  return rec.apply(s);
}

/// Records from --sweep, or a single record from the inline flags.
std::vector<SweepRecord> records_from(const ProblemOptions &p,
                                      const OracleOptions &o) {
  if (!p.sweep.empty())
    return load_sweep(p.sweep);
  SweepRecord rec;
  rec.A = p.A;
  rec.B = p.B;
  rec.l = p.l;
  rec.n_max = p.levels - 1;
  rec.R = o.R;
  rec.M = o.M;
  rec.N_b = o.N_b;
  rec.lambda = o.lambda;
  rec.mu = o.mu;
  rec.nu = o.nu;
  return {rec};
}

std::string timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

std::vector<std::string> stamp_lines(const std::string &command) {
  return {"spectra " + command, "generated " + timestamp()};
}

/// Writes either to the --output file or to `out`.
class Sink {
public:
  Sink(const OutputOptions &o, std::ostream &out) : out_(&out) {
    if (!o.output.empty()) {
      file_ = std::make_unique<std::ofstream>(o.output);
      if (!*file_)
        throw ParseError("cannot open output file '" + o.output + "'");
      out_ = file_.get();
    }
  }
  std::ostream &stream() { return *out_; }

private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream *out_;
};

void emit(const OutputOptions &o, std::ostream &out, CsvTable table,
          const nlohmann::json &json, const std::string &command) {
  Sink sink(o, out);
  if (o.format == "json") {
    nlohmann::json doc = json;
    if (o.stamp) {
      doc["meta"] = {{"command", command}, {"generated", timestamp()}};
    }
    sink.stream() << doc.dump(2) << '\n';
    return;
  }
  if (o.stamp) {
    auto lines = stamp_lines(command);
    table.comments.insert(table.comments.begin(), lines.begin(), lines.end());
  }
  write_csv(sink.stream(), table);
}

// inline flags describe one problem; only sweep files have record numbers
void validate_input(const ProblemOptions &p,
                    const std::vector<SweepRecord> &records) {
  if (!p.sweep.empty()) {
    validate_sweep(records);
    return;
  }
  const auto rep = validate(records.front().problem());
  if (!rep.ok())
    throw DomainError(rep.violation(), rep.boundary);
}

int cmd_spectrum(const ProblemOptions &p, const OutputOptions &o,
                 std::ostream &out) {
  const auto records = records_from(p, {});
  validate_input(p, records);
  std::vector<SpectrumRow> rows;
  for (const auto &rec : records) {
    auto part = spectrum_table(rec.problem(), rec.n_max + 1);
    rows.insert(rows.end(), part.begin(), part.end());
  }
  nlohmann::json j = nlohmann::json::array();
  for (const auto &r : rows)
    j.push_back(to_json(r));
  emit(o, out, to_csv(rows), {{"rows", j}}, "spectrum");
  return exit_ok;
}

int cmd_verify(const ProblemOptions &p, const OracleOptions &oo, double tol,
               const OutputOptions &o, std::ostream &out) {
  const auto records = records_from(p, oo);
  validate_input(p, records);
  OracleSettings base;
  base.tol = tol;
  std::vector<VerifyRow> rows;
  for (const auto &rec : records) {
    auto part = verify_table(rec.problem(), rec.n_max + 1, rec.apply(base));
    rows.insert(rows.end(), part.begin(), part.end());
  }
  bool all_ok = true;
  nlohmann::json j = nlohmann::json::array();
  for (const auto &r : rows) {
    all_ok = all_ok && r.status == to_string(CheckStatus::Ok);
    j.push_back(to_json(r));
  }
  emit(o, out, to_csv(rows), {{"rows", j}, {"tol", tol}, {"passed", all_ok}},
       "verify");
  return all_ok ? exit_ok : exit_check_failed;
}

int cmd_compare_ab(const ProblemOptions &p, const OracleOptions &oo,
                   double tol, bool explicit_problem, const OutputOptions &o,
                   std::ostream &out) {
  OracleSettings base;
  base.tol = tol;
  DiscrepancyReport report;
  if (p.sweep.empty() && !explicit_problem) {
    report = build_discrepancy_report(demo_sweep(), apply(oo, base));
  } else {
    const auto records = records_from(p, oo);
    validate_input(p, records);
    for (const auto &rec : records) {
      auto part = build_discrepancy_report(expand({rec}), rec.apply(base));
      report.rows.insert(report.rows.end(), part.rows.begin(), part.rows.end());
    }
  }
  auto table = to_csv(report);
  std::ostringstream summary;
  summary << "summary:";
  bool failed = false;
  for (auto v : {Verdict::ConfirmsCorrected, Verdict::ConfirmsUncorrected,
                 Verdict::Degenerate, Verdict::Inconclusive,
                 Verdict::OracleFailed, Verdict::Invalid}) {
    summary << ' ' << to_string(v) << '=' << report.count(v);
    if ((v == Verdict::OracleFailed || v == Verdict::Invalid) && report.count(v))
      failed = true;
  }
  table.comments.push_back(summary.str());
  emit(o, out, table, to_json(report), "compare-ab");
  return failed ? exit_check_failed : exit_ok;
}

int cmd_wavefunction(const ProblemOptions &p, const OracleOptions &oo, int n,
                     double rmin, double rmax, int samples, bool with_oracle,
                     const OutputOptions &o, std::ostream &out) {
  if (!(rmin > 0.0))
    throw CLI::ValidationError("--rmin", "must be positive");
  if (!(rmax >= rmin))
    throw CLI::ValidationError("--rmax", "must not be below --rmin");
  if (samples <= 0)
    throw CLI::ValidationError("--samples", "must be a positive integer");
  if (n < 0)
    throw CLI::ValidationError("--n", "must be non-negative");
  const RadialProblem problem{{p.A, p.B}, p.l};
  require_valid(problem);
  std::unique_ptr<OracleWavefunction> oracle;
  if (with_oracle) {
    const auto settings = apply(oo, OracleSettings{});
    oracle = std::make_unique<OracleWavefunction>(
        problem, n, oracle_grid(problem, n, settings));
  }
  const auto rows = wavefunction_table(problem, n, rmin, rmax,
                                       static_cast<std::size_t>(samples),
                                       oracle.get());
  nlohmann::json j = nlohmann::json::array();
  for (const auto &r : rows)
    j.push_back(to_json(r));
  emit(o, out, to_csv(rows, with_oracle), {{"rows", j}}, "wavefunction");
  return exit_ok;
}

} // namespace

int run(const std::vector<std::string> &args, std::ostream &out,
        std::ostream &err) {
  CLI::App app{"Bound-state spectra of the Kratzer-Fues potential "
               "V(r) = -A/r + B/r^2",
               "spectra"};
  app.require_subcommand(1);

  ProblemOptions spec_p, ver_p, ab_p, wf_p;
  OracleOptions ver_o, ab_o, wf_o;
  OutputOptions spec_out, ver_out, ab_out, wf_out;
  double ver_tol = 1e-6, ab_tol = 1e-6;
  int wf_n = 0, wf_samples = 200;
  double wf_rmin = 0.01, wf_rmax = 20.0;
  bool wf_oracle = false;

  auto *spectrum = app.add_subcommand("spectrum", "closed-form energy levels");
  add_problem_options(spectrum, spec_p, true);
  add_output_options(spectrum, spec_out);

  auto *verify =
      app.add_subcommand("verify", "closed form against both numerical oracles");
  add_problem_options(verify, ver_p, true);
  add_oracle_options(verify, ver_o);
  verify->add_option("--tol", ver_tol, "largest accepted pairwise deviation")
      ->capture_default_str();
  add_output_options(verify, ver_out);

  auto *compare = app.add_subcommand(
      "compare-ab", "adjudicate the reported and 2-beta corrected formulas");
  add_problem_options(compare, ab_p, true);
  add_oracle_options(compare, ab_o);
  compare->add_option("--tol", ab_tol, "verdict tolerance")->capture_default_str();
  add_output_options(compare, ab_out);

  auto *wave = app.add_subcommand("wavefunction", "sample phi(r) of one level");
  add_problem_options(wave, wf_p, false);
  add_oracle_options(wave, wf_o);
  wave->add_option("--n,--level", wf_n, "level index")->capture_default_str();
  wave->add_option("--rmin", wf_rmin)->capture_default_str();
  wave->add_option("--rmax", wf_rmax)->capture_default_str();
  wave->add_option("--samples", wf_samples)->capture_default_str();
  wave->add_flag("--with-oracle", wf_oracle,
                 "add the interpolated finite-difference eigenvector");
  add_output_options(wave, wf_out);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError &e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      for (auto *sub : app.get_subcommands())
        if (sub->parsed())
          out << sub->help();
      return exit_ok;
    }
    err << "error: " << e.what() << '\n';
    return exit_usage;
  }

  try {
    if (spectrum->parsed())
      return cmd_spectrum(spec_p, spec_out, out);
    if (verify->parsed())
      return cmd_verify(ver_p, ver_o, ver_tol, ver_out, out);
    if (compare->parsed()) {
      const bool explicit_problem =
          compare->count("--A") + compare->count("--B") +
              compare->count("--l") + compare->count("--levels") >
          0;
      return cmd_compare_ab(ab_p, ab_o, ab_tol, explicit_problem, ab_out, out);
    }
    if (wave->parsed())
      return cmd_wavefunction(wf_p, wf_o, wf_n, wf_rmin, wf_rmax, wf_samples,
                              wf_oracle, wf_out, out);
  } catch (const CLI::ValidationError &e) {
    err << "error: " << e.what() << '\n';
    return exit_usage;
  } catch (const DomainError &e) {
    err << "error: " << e.what() << '\n';
    return exit_usage;
  } catch (const ParseError &e) {
    err << "error: " << e.what() << '\n';
    return exit_usage;
  } catch (const std::exception &e) {
    err << "error: " << e.what() << '\n';
    return exit_check_failed;
  }
  return exit_usage;
}

} // namespace kfspectra::cli
