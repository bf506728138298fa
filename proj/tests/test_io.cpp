#include <catch_amalgamated.hpp>

#include <cstring>
#include <random>
#include <sstream>

#include "kfspectra/io.hpp"

using namespace kfspectra;

namespace {

bool same_bits(double a, double b) {
  if (std::isnan(a) && std::isnan(b))
    return true;
  return std::memcmp(&a, &b, sizeof a) == 0;
}

CsvTable reparse(const CsvTable &t) {
  std::stringstream ss;
  write_csv(ss, t);
  return read_csv(ss);
}

} // namespace

TEST_CASE("doubles round trip through 17 digits", "[io]") {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 2000; ++i) {
    const double x = u(rng) * std::pow(10.0, (i % 40) - 20);
    CHECK(same_bits(parse_double(format_double(x)), x));
  }
  CHECK(std::isnan(parse_double("nan")));
  CHECK(std::isinf(parse_double("inf")));
  CHECK_THROWS_AS(parse_double("1.5x"), ParseError);
  CHECK_THROWS_AS(parse_int("2.0"), ParseError);
}

TEST_CASE("CSV quoting", "[io]") {
  CsvTable t;
  t.comments = {"meta line"};
  t.header = {"a", "b"};
  t.rows = {{"plain", "with, comma"}, {"with \"quotes\"", ""}};
  const auto back = reparse(t);
  CHECK(back.comments == t.comments);
  CHECK(back.header == t.header);
  CHECK(back.rows == t.rows);

  std::istringstream bad("a,b\n1,2,3\n");
  CHECK_THROWS_AS(read_csv(bad), ParseError);
  std::istringstream empty("# only comments\n");
  CHECK_THROWS_AS(read_csv(empty), ParseError);
}

TEST_CASE("spectrum rows round trip", "[io]") {
  std::vector<SpectrumRow> rows;
  for (double B : {0.0, 0.37, 1.0})
    for (int l : {0, 3}) {
      auto part = spectrum_table({{1.1, B}, l}, 4);
      rows.insert(rows.end(), part.begin(), part.end());
    }
  CHECK(spectrum_rows_from_csv(reparse(to_csv(rows))) == rows);
}

TEST_CASE("discrepancy report round trips", "[io]") {
  DiscrepancyReport rep;
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 30; ++i) {
    DiscrepancyRow r;
    r.point = {std::abs(u(rng)) + 0.1, u(rng), i % 4, i % 5};
    r.Z = -r.point.A;
    r.beta = r.point.B;
    r.lambda_level = std::abs(u(rng));
    r.lambda_bound = std::abs(u(rng));
    r.two_z_over_lambda = u(rng) * 5;
    if (i % 3)
      r.ab_bound = i;
    r.exceeds_ab_bound = i % 2;
    r.E_ab = u(rng);
    r.E_ab_corrected = u(rng);
    r.E_frobenius = u(rng);
    r.E_oracle = i % 7 ? u(rng) : std::nan("");
    r.E_oracle_error = u(rng) * 1e-9;
    r.E_galerkin = u(rng);
    r.dev_ab = u(rng);
    r.dev_corrected = u(rng);
    r.verdict = static_cast<Verdict>(i % 6);
    r.message = i % 4 ? "" : "oracle said \"no\", twice";
    rep.rows.push_back(r);
  }
  auto check_equal = [](const DiscrepancyReport &a, const DiscrepancyReport &b) {
    REQUIRE(a.rows.size() == b.rows.size());
    for (std::size_t i = 0; i < a.rows.size(); ++i) {
      const auto &x = a.rows[i], &y = b.rows[i];
      CHECK(same_bits(x.point.A, y.point.A));
      CHECK(same_bits(x.point.B, y.point.B));
      CHECK(x.point.l == y.point.l);
      CHECK(x.point.n == y.point.n);
      CHECK(same_bits(x.Z, y.Z));
      CHECK(same_bits(x.beta, y.beta));
      CHECK(same_bits(x.lambda_level, y.lambda_level));
      CHECK(same_bits(x.lambda_bound, y.lambda_bound));
      CHECK(same_bits(x.two_z_over_lambda, y.two_z_over_lambda));
      CHECK(x.ab_bound == y.ab_bound);
      CHECK(x.exceeds_ab_bound == y.exceeds_ab_bound);
      CHECK(same_bits(x.E_ab, y.E_ab));
      CHECK(same_bits(x.E_ab_corrected, y.E_ab_corrected));
      CHECK(same_bits(x.E_frobenius, y.E_frobenius));
      CHECK(same_bits(x.E_oracle, y.E_oracle));
      CHECK(same_bits(x.E_oracle_error, y.E_oracle_error));
      CHECK(same_bits(x.E_galerkin, y.E_galerkin));
      CHECK(same_bits(x.dev_ab, y.dev_ab));
      CHECK(same_bits(x.dev_corrected, y.dev_corrected));
      CHECK(x.verdict == y.verdict);
      CHECK(x.message == y.message);
    }
  };
  check_equal(rep, discrepancy_from_csv(reparse(to_csv(rep))));
  check_equal(rep, discrepancy_from_json(nlohmann::json::parse(to_json(rep).dump())));
}

TEST_CASE("sweep text format", "[io]") {
  std::istringstream in(R"(# A B l n_max
1 1 0 2
  2.5 0.5 1 0   R=80 M=4000   # trailing comment

0.5 -0.1 0 1 N_b=20 lambda=0.7 mu=1.5 nu=2
)");
  const auto recs = parse_sweep_text(in);
  REQUIRE(recs.size() == 3);
  CHECK(recs[0].A == 1.0);
  CHECK(recs[0].n_max == 2);
  CHECK_FALSE(recs[0].R.has_value());
  CHECK(recs[1].R == 80.0);
  CHECK(recs[1].M == std::size_t{4000});
  CHECK(recs[2].B == -0.1);
  CHECK(recs[2].N_b == std::size_t{20});
  CHECK(recs[2].lambda == 0.7);
  CHECK(recs[2].mu == 1.5);
  CHECK(recs[2].nu == 2.0);

  const auto settings = recs[1].apply({});
  CHECK(settings.box_radius == 80.0);
  CHECK(settings.grid_points == 4000);

  const auto pts = expand(recs);
  CHECK(pts.size() == 3 + 1 + 2);
  CHECK(pts[2].n == 2);

  std::istringstream bad1("1 1 0\n");
  CHECK_THROWS_AS(parse_sweep_text(bad1), ParseError);
  std::istringstream bad2("1 1 0 1 foo=3\n");
  CHECK_THROWS_AS(parse_sweep_text(bad2), ParseError);
  std::istringstream bad3("1 1 0 1 M=-3\n");
  CHECK_THROWS_AS(parse_sweep_text(bad3), ParseError);
}

TEST_CASE("sweep JSON format matches the text format", "[io]") {
  std::istringstream text("1 1 0 2\n2.5 0.5 1 0 R=80 M=4000\n0.5 -0.1 0 1 N_b=20 lambda=0.7\n");
  const auto from_text = parse_sweep_text(text);
  nlohmann::json arr = nlohmann::json::array();
  for (const auto &r : from_text)
    arr.push_back(to_json(r));
  CHECK(parse_sweep_json(arr) == from_text);
  CHECK(parse_sweep_json({{"records", arr}}) == from_text);
  CHECK_THROWS_AS(parse_sweep_json(nlohmann::json::parse(R"([{"A": 1}])")), ParseError);
}

TEST_CASE("sweep validation", "[io]") {
  std::vector<SweepRecord> recs(2);
  recs[1].B = -1.0;
  try {
    validate_sweep(recs);
    FAIL("expected DomainError");
  } catch (const DomainError &e) {
    CHECK(std::string(e.what()).find("record 2") != std::string::npos);
    CHECK(e.boundary() == -0.125);
  }
}
