#include "cli.hpp"

#include "csv.hpp"
#include "format.hpp"
#include "sim_config.hpp"

#include "qlstat/coverage_oracle.hpp"
#include "qlstat/error.hpp"
#include "qlstat/parallel.hpp"
#include "qlstat/special_functions.hpp"

#include "CLI11.hpp"

#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>

namespace qlstat::cli {

namespace {

constexpr int kSchema = 1;

struct RequestOptions
{
  double p = 0.5;
  double alpha = 0.05;
  std::string side = "two_sided";
  bool calibrated = false;
  double tail_split = 0.5;

  QuantileRequest request() const
  {
    QuantileRequest r{ p, alpha, parse_side(side), calibrated, tail_split };
    r.validate();
    return r;
  }
};

void add_request_options(CLI::App* cmd, RequestOptions& o)
{
  cmd->add_option("--p", o.p, "quantile level in (0, 1)")->required();
  cmd->add_option("--alpha", o.alpha, "1 - confidence level")->capture_default_str();
  cmd->add_option("--side", o.side, "lower, upper or two_sided")->capture_default_str();
  cmd->add_flag("--calibrated", o.calibrated, "add the analytic n^-1 coverage term to alpha");
  cmd->add_option("--tail-split", o.tail_split, "share of alpha on the low tail (two-sided)")
    ->capture_default_str();
}

struct Options
{
  RequestOptions req;
  std::string input = "-";
  std::string format = "json";
  std::optional<double> bound_lower;
  std::optional<double> bound_upper;

  // ci
  std::string col;

  // cond-ci / bandwidth
  std::string y;
  std::vector<std::string> x;
  std::vector<std::string> discrete;
  std::vector<std::string> x0;
  std::optional<std::string> cell;
  std::optional<double> h;
  bool no_large_n = false;
  std::string joint = "none";
  unsigned threads = 0;

  // simulate
  std::string table;
  std::string config;
  std::string rows;
  std::size_t reps = 0;
  std::uint64_t seed = 1;

  // oracle
  std::size_t n = 0;
};

void add_format(CLI::App* cmd, Options& o)
{
  cmd->add_option("--format", o.format, "json or csv")
    ->check(CLI::IsMember({ "json", "csv" }))
    ->capture_default_str();
}

void add_bounds(CLI::App* cmd, Options& o)
{
  cmd->add_option("--bound-lower", o.bound_lower, "known lower support bound (conservative substitute for X_0)");
  cmd->add_option("--bound-upper", o.bound_upper, "known upper support bound (conservative substitute for X_{n+1})");
}

void add_design_options(CLI::App* cmd, Options& o)
{
  cmd->add_option("--y", o.y, "response column")->required();
  // one value per occurrence so a trailing input path is not swallowed
  cmd->add_option("--x", o.x, "continuous covariate column(s), comma separated")
    ->required()
    ->allow_extra_args(false)
    ->delimiter(',');
  cmd->add_option("--discrete", o.discrete, "discrete covariate column(s), comma separated")
    ->allow_extra_args(false)
    ->delimiter(',');
  cmd->add_option("--x0", o.x0, "evaluation point(s), comma separated; coordinates of one point joined by ':'")
    ->required()
    ->allow_extra_args(false)
    ->delimiter(',');
  cmd->add_option("--cell", o.cell, "discrete cell of the evaluation points (values joined by '|')");
  cmd->add_flag("--no-large-n", o.no_large_n, "drop the max(1, n/1000)^(5/60) coefficient");
}

unsigned worker_count(unsigned requested)
{
  return requested > 0 ? requested : default_thread_count();
}

CsvTable load_table(const std::string& path, std::istream& in)
{
  if (path == "-")
    return read_csv(in);
  std::ifstream file(path, std::ios::binary);
  if (!file)
    throw DataError("cannot open input file '" + path + "'");
  return read_csv(file);
}

SupportBounds bounds_of(const Options& o)
{
  SupportBounds b;
  b.lower = o.bound_lower;
  b.upper = o.bound_upper;
  return b;
}

Json optional_number(const std::optional<double>& v)
{
  return v ? number(*v) : Json(nullptr);
}

void request_fields(Json& doc, const QuantileRequest& r)
{
  doc["p"] = number(r.p);
  doc["alpha"] = number(r.alpha);
  doc["side"] = std::string(to_string(r.side));
  doc["calibrated"] = r.calibrated;
  if (r.side == Side::two_sided)
    doc["tail_split"] = number(r.tail_split);
}

void interval_fields(Json& doc, const ConfidenceInterval& ci)
{
  doc["lower"] = number(ci.lower);
  doc["upper"] = number(ci.upper);
  doc["u_low"] = optional_number(ci.indices.u_low);
  doc["u_high"] = optional_number(ci.indices.u_high);
  doc["eps_low"] = ci.indices.u_low ? number(ci.indices.eps_low) : Json(nullptr);
  doc["eps_high"] = ci.indices.u_high ? number(ci.indices.eps_high) : Json(nullptr);
  doc["alpha_effective_low"] =
    ci.indices.u_low ? number(ci.indices.alpha_effective_low) : Json(nullptr);
  doc["alpha_effective_high"] =
    ci.indices.u_high ? number(ci.indices.alpha_effective_high) : Json(nullptr);
  doc["n"] = ci.n;
  doc["conservative"] = ci.conservative;
}

std::vector<EvaluationPoint> parse_points(const Options& o, std::size_t dims)
{
  std::vector<EvaluationPoint> points;
  for (const auto& text : o.x0) {
    EvaluationPoint pt;
    std::stringstream ss(text);
    std::string coord;
    while (std::getline(ss, coord, ':')) {
      try {
        std::size_t used = 0;
        pt.x0.push_back(std::stod(coord, &used));
        if (used != coord.size())
          throw std::invalid_argument(coord);
      } catch (const std::exception&) {
        throw DomainError("--x0 coordinate '" + coord + "' is not a number");
      }
    }
    if (pt.x0.size() != dims) {
      std::ostringstream msg;
      msg << "--x0 point '" << text << "' has " << pt.x0.size() << " coordinate(s), expected " << dims;
      throw DomainError(msg.str());
    }
    pt.cell = o.cell;
    points.push_back(std::move(pt));
  }
  return points;
}

Dataset load_dataset(const Options& o, std::istream& in)
{
  const CsvTable table = load_table(o.input, in);
  return to_dataset(table, { o.y, o.x, o.discrete });
}

void emit(std::ostream& out, const Options& o, const Json& doc, const Json& rows)
{
  if (o.format == "csv")
    write_csv(out, rows);
  else
    write_json(out, doc);
}

// ---------------------------------------------------------------- commands

void cmd_ci(const Options& o, std::istream& in, std::ostream& out)
{
  const QuantileRequest req = o.req.request();
  const CsvTable table = load_table(o.input, in);
  const SortedSample sample(numeric_column(table, o.col));
  const ConfidenceInterval ci = confidence_interval(sample, req, bounds_of(o));

  Json doc;
  doc["schema"] = kSchema;
  doc["command"] = "ci";
  request_fields(doc, req);
  interval_fields(doc, ci);
  emit(out, o, doc, Json::array({ doc }));
}

Json bandwidth_json(const BandwidthReport& bw)
{
  Json b;
  b["h"] = number(bw.h);
  b["rule"] = bw.rule;
  b["base_h"] = number(bw.base_h);
  b["large_n_coefficient"] = number(bw.large_n_coefficient);
  b["bias_sign"] = bw.bias_sign;
  b["flat_bias"] = bw.flat_bias;
  b["n"] = bw.n;
  Json nu;
  nu["f_x"] = number(bw.nuisances.f_x);
  nu["f_x_prime"] = number(bw.nuisances.f_x_prime);
  nu["cdf_d1"] = number(bw.nuisances.cdf_d1);
  nu["cdf_d2"] = number(bw.nuisances.cdf_d2);
  nu["cond_density"] = number(bw.nuisances.cond_density);
  nu["x_scale"] = number(bw.nuisances.x_scale);
  b["nuisances"] = nu;
  if (bw.cdf) {
    b["pilot_bandwidth"] = number(bw.cdf->pilot_bandwidth);
    b["pilot_local_n"] = bw.cdf->local_n;
    b["pilot_xi_p"] = number(bw.cdf->pilot_xi_p);
  }
  return b;
}

Json point_key(const EvaluationPoint& pt)
{
  Json x0 = Json::array();
  for (double v : pt.x0)
    x0.push_back(number(v));
  return x0;
}

void cmd_cond_ci(const Options& o, std::istream& in, std::ostream& out)
{
  const QuantileRequest req = o.req.request();
  const Dataset data = load_dataset(o, in);
  const std::vector<EvaluationPoint> points = parse_points(o, data.dims());

  ConditionalOptions opt;
  opt.h = o.h;
  opt.large_n_adjustment = !o.no_large_n;
  opt.bounds = bounds_of(o);
  JointResult res;
  if (o.joint == "none") {
    res.pointwise_alpha = req.alpha;
    for (const auto& point : points)
      res.points.push_back(conditional_interval(data, point, req, opt));
  } else {
    res = joint_intervals(data, points, req, parse_joint_mode(o.joint), opt, worker_count(o.threads));
  }

  Json doc;
  doc["schema"] = kSchema;
  doc["command"] = "cond-ci";
  request_fields(doc, req);
  doc["n"] = data.size();
  doc["joint_mode"] = o.joint == "none" ? std::string("none") : std::string(to_string(res.mode));
  doc["pointwise_alpha"] = number(res.pointwise_alpha);
  Json pts = Json::array();
  Json rows = Json::array();
  for (std::size_t j = 0; j < points.size(); ++j) {
    const ConditionalResult& r = res.points[j];
    Json pt;
    pt["x0"] = point_key(points[j]);
    pt["cell"] = points[j].cell ? Json(*points[j].cell) : Json(nullptr);
    pt["h"] = number(r.window.h);
    pt["bandwidth_rule"] = r.bandwidth ? Json(r.bandwidth->rule) : Json("user");
    pt["local_n"] = r.local_n;
    interval_fields(pt, r.ci);
    pt.erase("n");
    pts.push_back(pt);

    Json row;
    row["x0"] = pt["x0"];
    row["cell"] = pt["cell"];
    row["p"] = number(req.p);
    row["pointwise_alpha"] = number(res.pointwise_alpha);
    for (const auto& [k, v] : pt.items()) {
      if (k != "x0" && k != "cell")
        row[k] = v;
    }
    rows.push_back(row);
  }
  doc["points"] = pts;
  emit(out, o, doc, rows);
}

void cmd_bandwidth(const Options& o, std::istream& in, std::ostream& out)
{
  const QuantileRequest req = o.req.request();
  const Dataset data = load_dataset(o, in);
  const std::vector<EvaluationPoint> points = parse_points(o, data.dims());

  Json doc;
  doc["schema"] = kSchema;
  doc["command"] = "bandwidth";
  request_fields(doc, req);
  doc["n"] = data.size();
  Json pts = Json::array();
  Json rows = Json::array();
  for (const auto& point : points) {
    const BandwidthReport bw = conditional_bandwidth(data, point, req, !o.no_large_n);
    Json pt;
    pt["x0"] = point_key(point);
    pt["cell"] = point.cell ? Json(*point.cell) : Json(nullptr);
    const Json detail = bandwidth_json(bw);
    for (const auto& [k, v] : detail.items())
      pt[k] = v;
    pts.push_back(pt);

    Json row;
    for (const auto& [k, v] : pt.items()) {
      if (k == "nuisances") {
        for (const auto& [nk, nv] : v.items())
          row[nk] = nv;
      } else {
        row[k] = v;
      }
    }
    rows.push_back(row);
  }
  doc["points"] = pts;
  emit(out, o, doc, rows);
}

void cmd_simulate(const Options& o, std::ostream& out)
{
  if (o.table.empty() == o.config.empty())
    throw CLI::ValidationError("simulate needs exactly one of --table and --config");
  SimConfig config;
  if (!o.table.empty()) {
    config = builtin_config(o.table);
  } else {
    std::ifstream file(o.config);
    if (!file)
      throw DataError("cannot open config file '" + o.config + "'");
    Json j;
    try {
      j = Json::parse(file);
    } catch (const nlohmann::json::exception& e) {
      throw DomainError(std::string("config is not valid JSON: ") + e.what());
    }
    config = parse_sim_config(j);
  }
  SimRunOptions run;
  run.seed = o.seed;
  run.threads = worker_count(o.threads);
  run.rows = o.rows;
  run.reps = o.reps;
  const Json rows = run_sim_config(config, run);

  Json doc;
  doc["schema"] = kSchema;
  doc["command"] = "simulate";
  doc["config"] = config.name;
  doc["rows"] = rows;
  emit(out, o, doc, rows);
}

void cmd_oracle(const Options& o, std::ostream& out)
{
  const QuantileRequest req = o.req.request();
  if (o.n == 0)
    throw DomainError("--n must be positive");
  const EndpointIndices idx = endpoint_indices(o.n, req);
  const ExactCoverage exact = exact_interval_coverage(o.n, req);

  // first-order coverage: 1 - alpha plus the n^-1 term of each tail
  double first_order = 1.0 - req.alpha;
  auto add_term = [&](double level, double eps) {
    const double z = special::normal_quantile(1.0 - level);
    first_order += eps * (1.0 - eps) * z * special::normal_pdf(z) /
                   (req.p * (1.0 - req.p) * static_cast<double>(o.n));
  };
  if (!req.calibrated) {
    if (idx.u_low)
      add_term(req.low_level(), idx.eps_low);
    if (idx.u_high)
      add_term(req.high_level(), idx.eps_high);
  }

  Json doc;
  doc["schema"] = kSchema;
  doc["command"] = "oracle";
  request_fields(doc, req);
  doc["n"] = o.n;
  doc["u_low"] = optional_number(idx.u_low);
  doc["u_high"] = optional_number(idx.u_high);
  doc["eps_low"] = idx.u_low ? number(idx.eps_low) : Json(nullptr);
  doc["eps_high"] = idx.u_high ? number(idx.eps_high) : Json(nullptr);
  doc["exact_cp"] = number(exact.cp);
  doc["method"] = std::string(to_string(exact.method));
  doc["abs_error_bound"] = number(exact.abs_error_bound);
  doc["nominal"] = number(1.0 - req.alpha);
  doc["first_order_cp"] = req.calibrated ? Json(nullptr) : number(first_order);
  emit(out, o, doc, Json::array({ doc }));
}

// ---------------------------------------------------------------- errors

int fail(std::ostream& err, int code, const char* kind, const std::string& message, Json extra = Json::object())
{
  Json d;
  d["error"] = kind;
  d["exit"] = code;
  d["message"] = message;
  for (const auto& [k, v] : extra.items())
    d[k] = v;
  err << d.dump() << '\n';
  return code;
}

} // namespace

int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err)
{
  CLI::App app{ "Confidence intervals for unconditional and conditional quantiles", "qlstat" };
  // -h is taken by the bandwidth option --h
  app.set_help_flag("--help", "Print this help message and exit");
  app.require_subcommand(1);
  Options o;

  auto* ci = app.add_subcommand("ci", "interval for an unconditional quantile of one column");
  add_request_options(ci, o.req);
  ci->add_option("--col", o.col, "data column")->required();
  add_bounds(ci, o);
  add_format(ci, o);
  ci->add_option("input", o.input, "CSV file, '-' for stdin")->capture_default_str();

  auto* cond = app.add_subcommand("cond-ci", "windowed interval for a conditional quantile");
  add_request_options(cond, o.req);
  add_design_options(cond, o);
  cond->add_option("--h", o.h, "window half-width (default: plug-in, one covariate only)");
  cond->add_option("--joint", o.joint, "none (pointwise), bonferroni or independent_windows")
    ->capture_default_str();
  cond->add_option("--threads", o.threads, "workers (default QLSTAT_THREADS or all cores)");
  add_bounds(cond, o);
  add_format(cond, o);
  cond->add_option("input", o.input, "CSV file, '-' for stdin")->capture_default_str();

  auto* bw = app.add_subcommand("bandwidth", "plug-in bandwidth and its nuisance estimates");
  add_request_options(bw, o.req);
  add_design_options(bw, o);
  add_format(bw, o);
  bw->add_option("input", o.input, "CSV file, '-' for stdin")->capture_default_str();

  auto* sim = app.add_subcommand("simulate", "Monte Carlo coverage of a configuration");
  sim->add_option("--table", o.table, "shipped configuration: 1, 2, 3, calib, bump, rqss");
  sim->add_option("--config", o.config, "JSON configuration file");
  sim->add_option("--rows", o.rows, "lstat, calib or all (default: the config's methods)")
    ->check(CLI::IsMember({ "lstat", "calib", "all" }));
  sim->add_option("--reps", o.reps, "replications (default: the config's)");
  sim->add_option("--seed", o.seed, "random seed")->capture_default_str();
  sim->add_option("--threads", o.threads, "workers (default QLSTAT_THREADS or all cores)");
  o.format = "json";
  std::string sim_format = "csv";
  sim->add_option("--format", sim_format, "csv or json")
    ->check(CLI::IsMember({ "json", "csv" }))
    ->capture_default_str();

  auto* oracle = app.add_subcommand("oracle", "exact coverage of the interval on a uniform sample");
  add_request_options(oracle, o.req);
  oracle->add_option("--n", o.n, "sample size")->required();
  add_format(oracle, o);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return exit_ok;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return exit_ok;
  } catch (const CLI::ParseError& e) {
    // subcommand help lands here with the subcommand's own formatter
    if (e.get_exit_code() == 0) {
      out << e.what() << '\n';
      return exit_ok;
    }
    return fail(err, exit_usage, "usage", e.what());
  }

  try {
    if (*ci)
      cmd_ci(o, in, out);
    else if (*cond)
      cmd_cond_ci(o, in, out);
    else if (*bw)
      cmd_bandwidth(o, in, out);
    else if (*sim) {
      o.format = sim_format;
      cmd_simulate(o, out);
    } else if (*oracle)
      cmd_oracle(o, out);
    out.flush();
    return exit_ok;
  } catch (const ExtremeQuantileError& e) {
    Json extra;
    extra["tail"] = e.tail().empty() ? Json(nullptr) : Json(e.tail());
    extra["minimal_n"] = e.minimal_n() ? Json(*e.minimal_n()) : Json(nullptr);
    extra["local_n"] = e.local_n() ? Json(*e.local_n()) : Json(nullptr);
    return fail(err, exit_extreme_quantile, e.kind(), e.what(), extra);
  } catch (const DataError& e) {
    return fail(err, exit_data, e.kind(), e.what());
  } catch (const NumericalError& e) {
    return fail(err, exit_numerical, e.kind(), e.what());
  } catch (const Error& e) {
    return fail(err, exit_usage, e.kind(), e.what());
  } catch (const CLI::Error& e) {
    return fail(err, exit_usage, "usage", e.what());
  } catch (const std::exception& e) {
    return fail(err, exit_numerical, "internal", e.what());
  }
}

} // namespace qlstat::cli
