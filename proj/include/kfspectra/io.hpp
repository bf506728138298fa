#pragma once

#include <cmath>
#include <cstddef>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "kfspectra/ab_formulas.hpp"
#include "kfspectra/tables.hpp"

namespace kfspectra {

class ParseError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Numbers

/// 17 significant digits, enough for an exact double round trip.
inline std::string format_double(double x) {
  if (std::isnan(x))
    return "nan";
  if (std::isinf(x))
    return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline double parse_double(const std::string &s) {
  if (s == "nan" || s.empty())
    return std::nan("");
  char *end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0')
    throw ParseError("not a number: '" + s + "'");
  return v;
}

inline int parse_int(const std::string &s) {
  std::size_t pos = 0;
  int v = 0;
  try {
    v = std::stoi(s, &pos);
  } catch (const std::exception &) {
    throw ParseError("not an integer: '" + s + "'");
  }
  if (pos != s.size())
    throw ParseError("not an integer: '" + s + "'");
  return v;
}

// ---------------------------------------------------------------------------
// CSV

/// Header plus string cells. Lines starting with '#' are metadata and are
/// kept separately.
struct CsvTable {
  std::vector<std::string> comments;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(const std::string &name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name)
        return i;
    throw ParseError("missing column '" + name + "'");
  }
};

namespace detail {

inline std::string csv_escape(const std::string &cell) {
  if (cell.find_first_of(",\"\n") == std::string::npos)
    return cell;
  std::string out = "\"";
  for (char c : cell) {
    if (c == '"')
      out += '"';
    out += c;
  }
  return out + '"';
}

inline std::vector<std::string> csv_split(const std::string &line) {
  std::vector<std::string> cells;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      cells.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  cells.push_back(std::move(cur));
  return cells;
}

} // namespace detail

inline void write_csv(std::ostream &os, const CsvTable &t) {
  for (const auto &c : t.comments)
    os << "# " << c << '\n';
  auto line = [&os](const std::vector<std::string> &cells) {
    for (std::size_t i = 0; i < cells.size(); ++i)
      os << (i ? "," : "") << detail::csv_escape(cells[i]);
    os << '\n';
  };
  line(t.header);
  for (const auto &r : t.rows)
    line(r);
}

inline CsvTable read_csv(std::istream &is) {
  CsvTable t;
  std::string line;
  bool have_header = false;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r')
      line.pop_back();
    if (line.empty())
      continue;
    if (line[0] == '#') {
      t.comments.push_back(line.size() > 2 ? line.substr(2) : std::string());
      continue;
    }
    auto cells = detail::csv_split(line);
    if (!have_header) {
      t.header = std::move(cells);
      have_header = true;
    } else {
      if (cells.size() != t.header.size())
        throw ParseError("CSV row has " + std::to_string(cells.size()) +
                         " fields, header has " +
                         std::to_string(t.header.size()));
      t.rows.push_back(std::move(cells));
    }
  }
  if (!have_header)
    throw ParseError("CSV input has no header");
  return t;
}

// ---------------------------------------------------------------------------
// Spectrum rows

inline CsvTable to_csv(const std::vector<SpectrumRow> &rows) {
  CsvTable t;
  t.header = {"A", "B", "l", "n", "energy", "s", "decay_alpha"};
  for (const auto &r : rows)
    t.rows.push_back({format_double(r.A), format_double(r.B),
                      std::to_string(r.l), std::to_string(r.n),
                      format_double(r.energy), format_double(r.s),
                      format_double(r.decay_alpha)});
  return t;
}

inline std::vector<SpectrumRow> spectrum_rows_from_csv(const CsvTable &t) {
  const auto cA = t.column("A"), cB = t.column("B"), cl = t.column("l"),
             cn = t.column("n"), cE = t.column("energy"), cs = t.column("s"),
             ca = t.column("decay_alpha");
  std::vector<SpectrumRow> rows;
  for (const auto &r : t.rows)
    rows.push_back({parse_double(r[cA]), parse_double(r[cB]), parse_int(r[cl]),
                    parse_int(r[cn]), parse_double(r[cE]), parse_double(r[cs]),
                    parse_double(r[ca])});
  return rows;
}

inline nlohmann::json to_json(const SpectrumRow &r) {
  return {{"A", r.A},      {"B", r.B}, {"l", r.l},
          {"n", r.n},      {"energy", r.energy},
          {"s", r.s},      {"decay_alpha", r.decay_alpha}};
}

// ---------------------------------------------------------------------------
// Verification rows

inline CsvTable to_csv(const std::vector<VerifyRow> &rows) {
  CsvTable t;
  t.header = {"A",          "B",          "l",             "n",
              "E_closed",   "E_fd",       "E_fd_error",    "E_galerkin",
              "max_deviation", "status",  "message"};
  for (const auto &r : rows)
    t.rows.push_back({format_double(r.A), format_double(r.B),
                      std::to_string(r.l), std::to_string(r.n),
                      format_double(r.E_closed), format_double(r.E_fd),
                      format_double(r.E_fd_error), format_double(r.E_galerkin),
                      format_double(r.max_deviation), r.status, r.message});
  return t;
}

inline std::vector<VerifyRow> verify_rows_from_csv(const CsvTable &t) {
  std::vector<VerifyRow> rows;
  for (const auto &c : t.rows) {
    VerifyRow r;
    r.A = parse_double(c[t.column("A")]);
    r.B = parse_double(c[t.column("B")]);
    r.l = parse_int(c[t.column("l")]);
    r.n = parse_int(c[t.column("n")]);
    r.E_closed = parse_double(c[t.column("E_closed")]);
    r.E_fd = parse_double(c[t.column("E_fd")]);
    r.E_fd_error = parse_double(c[t.column("E_fd_error")]);
    r.E_galerkin = parse_double(c[t.column("E_galerkin")]);
    r.max_deviation = parse_double(c[t.column("max_deviation")]);
    r.status = c[t.column("status")];
    r.message = c[t.column("message")];
    rows.push_back(std::move(r));
  }
  return rows;
}

namespace detail {
inline nlohmann::json number_or_null(double x) {
  return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(nullptr);
}
inline double number_from(const nlohmann::json &j) {
  return j.is_null() ? std::nan("") : j.get<double>();
}
} // namespace detail

inline nlohmann::json to_json(const VerifyRow &r) {
  using detail::number_or_null;
  return {{"A", r.A},
          {"B", r.B},
          {"l", r.l},
          {"n", r.n},
          {"E_closed", number_or_null(r.E_closed)},
          {"E_fd", number_or_null(r.E_fd)},
          {"E_fd_error", number_or_null(r.E_fd_error)},
          {"E_galerkin", number_or_null(r.E_galerkin)},
          {"max_deviation", number_or_null(r.max_deviation)},
          {"status", r.status},
          {"message", r.message}};
}

// ---------------------------------------------------------------------------
// Discrepancy report

inline CsvTable to_csv(const DiscrepancyReport &report) {
  CsvTable t;
  t.header = {"A",
              "B",
              "l",
              "k",
              "Z",
              "beta",
              "lambda_level",
              "lambda_bound",
              "two_z_over_lambda",
              "ab_bound",
              "exceeds_ab_bound",
              "E_ab",
              "E_ab_corrected",
              "E_frobenius",
              "E_oracle",
              "E_oracle_error",
              "E_galerkin",
              "dev_ab",
              "dev_corrected",
              "verdict",
              "message"};
  for (const auto &r : report.rows)
    t.rows.push_back(
        {format_double(r.point.A), format_double(r.point.B),
         std::to_string(r.point.l), std::to_string(r.point.n),
         format_double(r.Z), format_double(r.beta),
         format_double(r.lambda_level), format_double(r.lambda_bound),
         format_double(r.two_z_over_lambda),
         r.ab_bound ? std::to_string(*r.ab_bound) : std::string(),
         r.exceeds_ab_bound ? "true" : "false", format_double(r.E_ab),
         format_double(r.E_ab_corrected), format_double(r.E_frobenius),
         format_double(r.E_oracle), format_double(r.E_oracle_error),
         format_double(r.E_galerkin), format_double(r.dev_ab),
         format_double(r.dev_corrected), std::string(to_string(r.verdict)),
         r.message});
  return t;
}

inline DiscrepancyReport discrepancy_from_csv(const CsvTable &t) {
  DiscrepancyReport rep;
  for (const auto &c : t.rows) {
    auto get = [&](const char *name) -> const std::string & {
      return c[t.column(name)];
    };
    DiscrepancyRow r;
    r.point = {parse_double(get("A")), parse_double(get("B")),
               parse_int(get("l")), parse_int(get("k"))};
    r.Z = parse_double(get("Z"));
    r.beta = parse_double(get("beta"));
    r.lambda_level = parse_double(get("lambda_level"));
    r.lambda_bound = parse_double(get("lambda_bound"));
    r.two_z_over_lambda = parse_double(get("two_z_over_lambda"));
    if (!get("ab_bound").empty())
      r.ab_bound = parse_int(get("ab_bound"));
    const auto &ex = get("exceeds_ab_bound");
    if (ex != "true" && ex != "false")
      throw ParseError("exceeds_ab_bound must be true or false");
    r.exceeds_ab_bound = ex == "true";
    r.E_ab = parse_double(get("E_ab"));
    r.E_ab_corrected = parse_double(get("E_ab_corrected"));
    r.E_frobenius = parse_double(get("E_frobenius"));
    r.E_oracle = parse_double(get("E_oracle"));
    r.E_oracle_error = parse_double(get("E_oracle_error"));
    r.E_galerkin = parse_double(get("E_galerkin"));
    r.dev_ab = parse_double(get("dev_ab"));
    r.dev_corrected = parse_double(get("dev_corrected"));
    const auto v = verdict_from_string(get("verdict"));
    if (!v)
      throw ParseError("unknown verdict '" + get("verdict") + "'");
    r.verdict = *v;
    r.message = get("message");
    rep.rows.push_back(std::move(r));
  }
  return rep;
}

inline nlohmann::json to_json(const DiscrepancyRow &r) {
  using detail::number_or_null;
  return {{"A", r.point.A},
          {"B", r.point.B},
          {"l", r.point.l},
          {"k", r.point.n},
          {"Z", r.Z},
          {"beta", r.beta},
          {"lambda_level", number_or_null(r.lambda_level)},
          {"lambda_bound", number_or_null(r.lambda_bound)},
          {"two_z_over_lambda", number_or_null(r.two_z_over_lambda)},
          {"ab_bound", r.ab_bound ? nlohmann::json(*r.ab_bound) : nlohmann::json(nullptr)},
          {"exceeds_ab_bound", r.exceeds_ab_bound},
          {"E_ab", number_or_null(r.E_ab)},
          {"E_ab_corrected", number_or_null(r.E_ab_corrected)},
          {"E_frobenius", number_or_null(r.E_frobenius)},
          {"E_oracle", number_or_null(r.E_oracle)},
          {"E_oracle_error", number_or_null(r.E_oracle_error)},
          {"E_galerkin", number_or_null(r.E_galerkin)},
          {"dev_ab", number_or_null(r.dev_ab)},
          {"dev_corrected", number_or_null(r.dev_corrected)},
          {"verdict", std::string(to_string(r.verdict))},
          {"message", r.message}};
}

inline nlohmann::json to_json(const DiscrepancyReport &rep) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto &r : rep.rows)
    rows.push_back(to_json(r));
  nlohmann::json summary;
  for (auto v : {Verdict::ConfirmsCorrected, Verdict::ConfirmsUncorrected,
                 Verdict::Degenerate, Verdict::Inconclusive,
                 Verdict::OracleFailed, Verdict::Invalid})
    summary[std::string(to_string(v))] = rep.count(v);
  return {{"rows", rows}, {"summary", summary}};
}

inline DiscrepancyReport discrepancy_from_json(const nlohmann::json &j) {
  using detail::number_from;
  DiscrepancyReport rep;
  for (const auto &o : j.at("rows")) {
    DiscrepancyRow r;
    r.point = {o.at("A").get<double>(), o.at("B").get<double>(),
               o.at("l").get<int>(), o.at("k").get<int>()};
    r.Z = o.at("Z").get<double>();
    r.beta = o.at("beta").get<double>();
    r.lambda_level = number_from(o.at("lambda_level"));
    r.lambda_bound = number_from(o.at("lambda_bound"));
    r.two_z_over_lambda = number_from(o.at("two_z_over_lambda"));
    if (!o.at("ab_bound").is_null())
      r.ab_bound = o.at("ab_bound").get<int>();
    r.exceeds_ab_bound = o.at("exceeds_ab_bound").get<bool>();
    r.E_ab = number_from(o.at("E_ab"));
    r.E_ab_corrected = number_from(o.at("E_ab_corrected"));
    r.E_frobenius = number_from(o.at("E_frobenius"));
    r.E_oracle = number_from(o.at("E_oracle"));
    r.E_oracle_error = number_from(o.at("E_oracle_error"));
    r.E_galerkin = number_from(o.at("E_galerkin"));
    r.dev_ab = number_from(o.at("dev_ab"));
    r.dev_corrected = number_from(o.at("dev_corrected"));
    const auto v = verdict_from_string(o.at("verdict").get<std::string>());
    if (!v)
      throw ParseError("unknown verdict");
    r.verdict = *v;
    r.message = o.at("message").get<std::string>();
    rep.rows.push_back(std::move(r));
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Wavefunction samples

inline CsvTable to_csv(const std::vector<WavefunctionSample> &samples,
                       bool with_oracle) {
  CsvTable t;
  t.header = {"r", "phi"};
  if (with_oracle)
    t.header.push_back("phi_oracle");
  for (const auto &s : samples) {
    std::vector<std::string> row{format_double(s.r), format_double(s.phi)};
    if (with_oracle)
      row.push_back(format_double(s.phi_oracle));
    t.rows.push_back(std::move(row));
  }
  return t;
}

inline std::vector<WavefunctionSample> wavefunction_from_csv(const CsvTable &t) {
  const auto cr = t.column("r"), cp = t.column("phi");
  std::optional<std::size_t> co;
  for (std::size_t i = 0; i < t.header.size(); ++i)
    if (t.header[i] == "phi_oracle")
      co = i;
  std::vector<WavefunctionSample> out;
  for (const auto &c : t.rows) {
    WavefunctionSample s{parse_double(c[cr]), parse_double(c[cp])};
    if (co)
      s.phi_oracle = parse_double(c[*co]);
    out.push_back(s);
  }
  return out;
}

inline nlohmann::json to_json(const WavefunctionSample &s) {
  return {{"r", s.r},
          {"phi", s.phi},
          {"phi_oracle", detail::number_or_null(s.phi_oracle)}};
}

// ---------------------------------------------------------------------------
// Sweep files

/// One sweep record: a problem, the highest level of interest, and optional
/// oracle overrides.
struct SweepRecord {
  double A = 1.0;
  double B = 0.0;
  int l = 0;
  int n_max = 0;
  std::optional<double> R;
  std::optional<std::size_t> M;
  std::optional<std::size_t> N_b;
  std::optional<double> lambda, mu, nu;

  RadialProblem problem() const { return {{A, B}, l}; }

  OracleSettings apply(OracleSettings s) const {
    if (R)
      s.box_radius = R;
    if (M)
      s.grid_points = *M;
    if (N_b)
      s.basis_size = *N_b;
    if (lambda)
      s.lambda = lambda;
    if (mu)
      s.mu = mu;
    if (nu)
      s.nu = nu;
    return s;
  }

  bool operator==(const SweepRecord &) const = default;
};

namespace detail {

inline std::size_t parse_count(const std::string &s) {
  const int v = parse_int(s);
  if (v <= 0)
    throw ParseError("expected a positive integer, got '" + s + "'");
  return static_cast<std::size_t>(v);
}

inline void set_override(SweepRecord &rec, const std::string &key,
                         const std::string &value) {
  if (key == "R")
    rec.R = parse_double(value);
  else if (key == "M")
    rec.M = parse_count(value);
  else if (key == "N_b")
    rec.N_b = parse_count(value);
  else if (key == "lambda")
    rec.lambda = parse_double(value);
  else if (key == "mu")
    rec.mu = parse_double(value);
  else if (key == "nu")
    rec.nu = parse_double(value);
  else
    throw ParseError("unknown override key '" + key + "'");
}

} // namespace detail

/// Line format: `A B l n_max [key=value ...]`; '#' starts a comment.
inline std::vector<SweepRecord> parse_sweep_text(std::istream &is) {
  std::vector<SweepRecord> out;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos)
      line.erase(hash);
    std::istringstream ls(line);
    std::vector<std::string> tok;
    for (std::string t; ls >> t;)
      tok.push_back(t);
    if (tok.empty())
      continue;
    try {
      if (tok.size() < 4)
        throw ParseError("expected 'A B l n_max [key=value ...]'");
      SweepRecord rec;
      rec.A = parse_double(tok[0]);
      rec.B = parse_double(tok[1]);
      rec.l = parse_int(tok[2]);
      rec.n_max = parse_int(tok[3]);
      for (std::size_t i = 4; i < tok.size(); ++i) {
        const auto eq = tok[i].find('=');
        if (eq == std::string::npos)
          throw ParseError("override '" + tok[i] + "' is not key=value");
        detail::set_override(rec, tok[i].substr(0, eq), tok[i].substr(eq + 1));
      }
      out.push_back(rec);
    } catch (const ParseError &e) {
      throw ParseError("sweep line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

inline nlohmann::json to_json(const SweepRecord &r) {
  nlohmann::json j{{"A", r.A}, {"B", r.B}, {"l", r.l}, {"n_max", r.n_max}};
  if (r.R)
    j["R"] = *r.R;
  if (r.M)
    j["M"] = *r.M;
  if (r.N_b)
    j["N_b"] = *r.N_b;
  if (r.lambda)
    j["lambda"] = *r.lambda;
  if (r.mu)
    j["mu"] = *r.mu;
  if (r.nu)
    j["nu"] = *r.nu;
  return j;
}

/// JSON alternative: an array of records, or {"records": [...]}, using the
/// same field names as the line format.
inline std::vector<SweepRecord> parse_sweep_json(const nlohmann::json &doc) {
  const auto &arr = doc.is_object() ? doc.at("records") : doc;
  if (!arr.is_array())
    throw ParseError("sweep JSON must be an array of records");
  std::vector<SweepRecord> out;
  for (const auto &o : arr) {
    try {
      SweepRecord rec;
      rec.A = o.at("A").get<double>();
      rec.B = o.at("B").get<double>();
      rec.l = o.at("l").get<int>();
      rec.n_max = o.at("n_max").get<int>();
      for (const auto &[key, val] : o.items()) {
        if (key == "A" || key == "B" || key == "l" || key == "n_max")
          continue;
        detail::set_override(rec, key,
                             val.is_number_integer()
                                 ? std::to_string(val.get<long long>())
                                 : format_double(val.get<double>()));
      }
      out.push_back(rec);
    } catch (const nlohmann::json::exception &e) {
      throw ParseError(std::string("sweep JSON record: ") + e.what());
    }
  }
  return out;
}

inline std::vector<SweepRecord> load_sweep(const std::string &path) {
  std::ifstream in(path);
  if (!in)
    throw ParseError("cannot open sweep file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && (text[first] == '[' || text[first] == '{')) {
    try {
      return parse_sweep_json(nlohmann::json::parse(text));
    } catch (const nlohmann::json::exception &e) {
      throw ParseError(std::string("sweep JSON: ") + e.what());
    }
  }
  std::istringstream is(text);
  return parse_sweep_text(is);
}

/// Checks every record before any solver runs; throws DomainError naming the
/// record and the violated invariant.
inline void validate_sweep(const std::vector<SweepRecord> &records) {
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto rep = validate(records[i].problem());
    if (!rep.ok())
      throw DomainError("sweep record " + std::to_string(i + 1) + ": " +
                            rep.violation(),
                        rep.boundary);
    if (records[i].n_max < 0)
      throw DomainError("sweep record " + std::to_string(i + 1) +
                        ": n_max must be non-negative");
  }
}

/// Rows k = 0..n_max of every record, in order.
inline std::vector<SweepPoint> expand(const std::vector<SweepRecord> &records) {
  std::vector<SweepPoint> pts;
  for (const auto &r : records)
    for (int k = 0; k <= r.n_max; ++k)
      pts.push_back({r.A, r.B, r.l, k});
  return pts;
}

} // namespace kfspectra
