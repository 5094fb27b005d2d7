#include "doctest.h"

#include "cli.hpp"
#include "csv.hpp"
#include "format.hpp"

#include "qlstat/error.hpp"

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

using qlstat::cli::run;

namespace {

struct Outcome
{
  int code = 0;
  std::string out;
  std::string err;
};

Outcome invoke(const std::vector<std::string>& args, const std::string& stdin_text = {})
{
  std::istringstream in(stdin_text);
  std::ostringstream out;
  std::ostringstream err;
  Outcome o;
  o.code = run(args, in, out, err);
  o.out = out.str();
  o.err = err.str();
  return o;
}

std::string data(const std::string& name)
{
  return std::string(QLSTAT_TEST_DATA_DIR) + "/" + name;
}

std::string slurp(const std::string& path)
{
  std::ifstream f(path, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

// QLSTAT_UPDATE_GOLDEN=1 rewrites the files instead of comparing
void check_golden(const std::string& name, const std::string& text)
{
  const std::string path = std::string(QLSTAT_GOLDEN_DIR) + "/" + name;
  if (std::getenv("QLSTAT_UPDATE_GOLDEN")) {
    std::ofstream(path, std::ios::binary) << text;
    return;
  }
  const std::string expected = slurp(path);
  REQUIRE_MESSAGE(!expected.empty(), "missing golden file " << path);
  CHECK_MESSAGE(text == expected, name);
}

qlstat::cli::Json diagnostic(const Outcome& o)
{
  REQUIRE(!o.err.empty());
  CHECK(o.err.find('\n') == o.err.size() - 1);
  return qlstat::cli::Json::parse(o.err);
}

} // namespace

TEST_CASE("ci: schema and values")
{
  const Outcome o = invoke({ "ci", "--p", "0.5", "--alpha", "0.3", "--col", "y", data("small.csv") });
  REQUIRE(o.code == 0);
  const auto j = qlstat::cli::Json::parse(o.out);
  CHECK(j["schema"] == 1);
  for (const char* key : { "lower", "upper", "u_low", "u_high", "eps_low", "eps_high", "n" })
    CHECK_MESSAGE(j.contains(key), key);
  CHECK(j["n"] == 5);
  // index arithmetic: u(n+1) = 6 u, interpolation between neighbouring values
  const double u_low = j["u_low"];
  CHECK(j["lower"].get<double>() == doctest::Approx(1.0 + (6.0 * u_low - 1.0)).epsilon(1e-9));
  check_golden("ci.json", o.out);

  const Outcome csv = invoke({ "ci", "--p", "0.5", "--alpha", "0.3", "--col", "y", "--format", "csv", data("small.csv") });
  REQUIRE(csv.code == 0);
  check_golden("ci.csv", csv.out);

  const Outcome piped = invoke({ "ci", "--p", "0.5", "--alpha", "0.3", "--col", "y", "-" }, slurp(data("small.csv")));
  CHECK(piped.out == o.out);
}

TEST_CASE("ci: one-sided and calibrated")
{
  const Outcome o = invoke({ "ci", "--p", "0.5", "--alpha", "0.2", "--side", "lower", "--calibrated", "--col", "y", data("design.csv") });
  REQUIRE(o.code == 0);
  const auto j = qlstat::cli::Json::parse(o.out);
  CHECK(j["u_low"].is_null());
  CHECK(j["lower"].is_null());
  CHECK(j["alpha_effective_high"].get<double>() > 0.2);
  check_golden("ci_lower_calibrated.json", o.out);
}

TEST_CASE("ci: support bounds make the interval conservative")
{
  const Outcome missing = invoke({ "ci", "--p", "0.5", "--col", "y", data("small.csv") });
  CHECK(missing.code == 4);
  const auto d = diagnostic(missing);
  CHECK(d["error"] == "extreme_quantile");
  CHECK(d["tail"] == "low");
  CHECK(d["minimal_n"] == 6);

  const Outcome o = invoke({ "ci", "--p", "0.5", "--col", "y", "--bound-lower", "0", "--bound-upper", "6", data("small.csv") });
  REQUIRE(o.code == 0);
  const auto j = qlstat::cli::Json::parse(o.out);
  CHECK(j["conservative"] == true);
  CHECK(j["lower"].get<double>() >= 0.0);
  CHECK(j["lower"].get<double>() < 1.0);
  check_golden("ci_bounds.json", o.out);
}

TEST_CASE("cond-ci")
{
  const Outcome fixed = invoke({ "cond-ci", "--p", "0.5", "--y", "y", "--x", "x", "--x0", "0.3,0.7", "--h", "0.1", data("design.csv") });
  REQUIRE(fixed.code == 0);
  const auto j = qlstat::cli::Json::parse(fixed.out);
  CHECK(j["points"].size() == 2);
  CHECK(j["points"][0]["bandwidth_rule"] == "user");
  CHECK(j["pointwise_alpha"].get<double>() == 0.05);
  check_golden("cond_ci_fixed.json", fixed.out);

  const Outcome plugin = invoke({ "cond-ci", "--p", "0.5", "--y", "y", "--x", "x", "--x0", "0.5", "--format", "csv", data("design.csv") });
  REQUIRE(plugin.code == 0);
  check_golden("cond_ci_plugin.csv", plugin.out);

  const Outcome joint = invoke({ "cond-ci", "--p", "0.5", "--y", "y", "--x", "x", "--x0", "0.2", "--x0", "0.8", "--h", "0.1",
                                 "--joint", "independent_windows", "--threads", "2", data("design.csv") });
  REQUIRE(joint.code == 0);
  const auto jj = qlstat::cli::Json::parse(joint.out);
  CHECK(jj["pointwise_alpha"].get<double>() == doctest::Approx(0.02532057).epsilon(1e-6));

  const Outcome overlap = invoke({ "cond-ci", "--p", "0.5", "--y", "y", "--x", "x", "--x0", "0.4,0.5", "--h", "0.1",
                                   "--joint", "independent_windows", data("design.csv") });
  CHECK(overlap.code == 2);
  CHECK(diagnostic(overlap)["error"] == "mode_violation");

  const Outcome cells = invoke({ "cond-ci", "--p", "0.5", "--y", "y", "--x", "x", "--discrete", "group", "--cell", "b",
                                 "--x0", "0.5", "--h", "0.1", data("design.csv") });
  REQUIRE(cells.code == 0);
  CHECK(qlstat::cli::Json::parse(cells.out)["points"][0]["lower"].get<double>() > 1.2);
}

TEST_CASE("cond-ci: too extreme p for the local sample exits 4")
{
  const Outcome o = invoke({ "cond-ci", "--p", "0.01", "--y", "y", "--x", "x", "--x0", "0.5", "--h", "0.01", data("design.csv") });
  CHECK(o.code == 4);
  const auto d = diagnostic(o);
  CHECK(d["error"] == "extreme_quantile");
  CHECK(d["local_n"].get<int>() > 0);
  CHECK(d["message"].get<std::string>().find("N_n=") != std::string::npos);
}

TEST_CASE("bandwidth")
{
  const Outcome o = invoke({ "bandwidth", "--p", "0.5", "--y", "y", "--x", "x", "--x0", "0.3,0.5", data("design.csv") });
  REQUIRE(o.code == 0);
  const auto j = qlstat::cli::Json::parse(o.out);
  CHECK(j["points"][0]["h"].get<double>() > 0.0);
  CHECK(j["points"][0]["nuisances"].contains("cdf_d2"));
  check_golden("bandwidth.json", o.out);

  const Outcome two = invoke({ "bandwidth", "--p", "0.5", "--y", "y", "--x", "x,x", "--x0", "0.3:0.3", data("design.csv") });
  CHECK(two.code == 2);
}

TEST_CASE("oracle")
{
  const Outcome o = invoke({ "oracle", "--n", "11", "--p", "0.65", "--alpha", "0.1", "--side", "lower" });
  REQUIRE(o.code == 0);
  const auto j = qlstat::cli::Json::parse(o.out);
  CHECK(std::abs(j["exact_cp"].get<double>() - j["first_order_cp"].get<double>()) < 0.01);
  check_golden("oracle.json", o.out);

  const Outcome overflow = invoke({ "oracle", "--n", "1", "--p", "0.01", "--alpha", "0.2", "--side", "lower", "--calibrated" });
  CHECK(overflow.code == 5);
  CHECK(diagnostic(overflow)["error"] == "calibration_overflow");
}

TEST_CASE("simulate")
{
  const Outcome a = invoke({ "simulate", "--table", "1", "--rows", "lstat", "--reps", "500", "--seed", "7", "--threads", "1" });
  REQUIRE(a.code == 0);
  check_golden("simulate_table1.csv", a.out);
  const Outcome b = invoke({ "simulate", "--table", "1", "--rows", "lstat", "--reps", "500", "--seed", "7", "--threads", "4" });
  CHECK(a.out == b.out);

  const Outcome calib = invoke({ "simulate", "--table", "calib", "--reps", "300", "--seed", "3", "--format", "json", "--threads", "2" });
  REQUIRE(calib.code == 0);
  const auto j = qlstat::cli::Json::parse(calib.out);
  CHECK(j["rows"].size() == 8);
  for (const auto& row : j["rows"]) {
    const double total = row["cp"].get<double>() + row["too_low"].get<double>() + row["too_high"].get<double>();
    CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
  }
  check_golden("simulate_calib.json", calib.out);

  const Outcome cond = invoke({ "simulate", "--table", "bump", "--reps", "100", "--seed", "2", "--threads", "2" });
  REQUIRE(cond.code == 0);
  check_golden("simulate_bump.csv", cond.out);

  CHECK(invoke({ "simulate", "--table", "9" }).code == 2);
  CHECK(invoke({ "simulate" }).code == 2);
  CHECK(invoke({ "simulate", "--table", "1", "--reps", "50" }).code == 2);
}

TEST_CASE("simulate --config")
{
  const std::string path = std::string(QLSTAT_TEST_DATA_DIR) + "/../golden/custom_config.tmp.json";
  std::ofstream(path) << R"({"name":"custom","kind":"unconditional","reps":200,"cases":[{"n":30,"p":0.3,"dgp":"t3"}]})";
  const Outcome o = invoke({ "simulate", "--config", path, "--seed", "5", "--threads", "1" });
  std::remove(path.c_str());
  REQUIRE(o.code == 0);
  CHECK(o.out.find("custom,lstat,t3,30,0.3") != std::string::npos);
}

TEST_CASE("csv ingestion")
{
  std::istringstream two(slurp(data("two_rows.csv")));
  const auto table = qlstat::cli::read_csv(two);
  const auto d = qlstat::cli::to_dataset(table, { "y", { "x" }, {} });
  CHECK(d.size() == 2);

  const Outcome missing = invoke({ "ci", "--p", "0.5", "--col", "income", data("small.csv") });
  CHECK(missing.code == 3);
  const std::string msg = diagnostic(missing)["message"];
  CHECK(msg.find("'y'") != std::string::npos);
  CHECK(msg.find("'x'") != std::string::npos);

  const Outcome bad = invoke({ "ci", "--p", "0.5", "--col", "y", data("bad_numbers.csv") });
  CHECK(bad.code == 3);
  const std::string bad_msg = diagnostic(bad)["message"];
  CHECK(bad_msg.find("lines 3 5") != std::string::npos);

  std::istringstream quoted("name,\"va,l\"\r\n\"a \"\"b\"\"\",1.5\r\n");
  const auto q = qlstat::cli::read_csv(quoted);
  CHECK(q.header[1] == "va,l");
  CHECK(q.rows[0][0] == "a \"b\"");
  CHECK(qlstat::cli::numeric_column(q, "va,l")[0] == 1.5);

  CHECK(invoke({ "ci", "--p", "0.5", "--col", "y", "/nonexistent/file.csv" }).code == 3);
  CHECK(invoke({ "ci", "--p", "0.5", "--col", "y", "-" }, "").code == 3);
}

TEST_CASE("8528-row file is read and processed quickly")
{
  std::ostringstream text;
  text << "share,logexp\n";
  unsigned state = 12345;
  for (int i = 0; i < 8528; ++i) {
    state = state * 1103515245u + 12345u;
    const double x = (state >> 8) / 16777216.0;
    state = state * 1103515245u + 12345u;
    const double e = (state >> 8) / 16777216.0;
    text << 0.3 - 0.1 * x + 0.05 * e << ',' << 4.0 + x << '\n';
  }
  const auto start = std::chrono::steady_clock::now();
  const Outcome o = invoke({ "ci", "--p", "0.5", "--col", "share", "-" }, text.str());
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  REQUIRE(o.code == 0);
  CHECK(qlstat::cli::Json::parse(o.out)["n"] == 8528);
  CHECK(secs < 1.0);
}

TEST_CASE("usage errors and help")
{
  CHECK(invoke({}).code == 2);
  CHECK(diagnostic(invoke({}))["error"] == "usage");
  CHECK(invoke({ "ci", "--col", "y", data("small.csv") }).code == 2);
  const Outcome domain = invoke({ "ci", "--p", "1.5", "--col", "y", data("small.csv") });
  CHECK(domain.code == 2);
  CHECK(diagnostic(domain)["error"] == "domain");
  CHECK(invoke({ "ci", "--p", "0.5", "--side", "left", "--col", "y", data("small.csv") }).code == 2);
  const Outcome help = invoke({ "--help" });
  CHECK(help.code == 0);
  CHECK(help.out.find("cond-ci") != std::string::npos);
}
