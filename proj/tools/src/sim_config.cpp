#include "sim_config.hpp"

#include "format.hpp"

#include "qlstat/error.hpp"
#include "qlstat/simulation.hpp"

#include <map>

namespace qlstat::cli {

// generated from tools/configs/*.json
extern const std::map<std::string, std::string>& embedded_configs();

namespace {


template <class T>
T get_or(const Json& j, const char* key, T fallback)
{
  return j.contains(key) ? j.at(key).get<T>() : fallback;
}

void check_method(const std::string& m)
{
  if (m != "lstat" && m != "calib")
    throw DomainError("unknown method '" + m + "'; expected lstat or calib");
}

} // namespace

SimConfig parse_sim_config(const Json& j)
{
  try {
    SimConfig c;
    c.name = get_or<std::string>(j, "name", "custom");
    const std::string kind = j.at("kind").get<std::string>();
    if (kind != "unconditional" && kind != "conditional")
      throw DomainError("config kind must be unconditional or conditional");
    c.conditional = kind == "conditional";
    c.alpha = get_or(j, "alpha", 0.05);
    c.side = parse_side(get_or<std::string>(j, "side", "two_sided"));
    c.reps = get_or<std::size_t>(j, "reps", 1000);
    c.methods = get_or(j, "methods", std::vector<std::string>{ "lstat" });
    for (const auto& m : c.methods)
      check_method(m);

    if (!c.conditional) {
      for (const auto& e : j.at("cases")) {
        UnconditionalCase uc;
        uc.n = e.at("n").get<std::size_t>();
        uc.p = e.at("p").get<double>();
        uc.dgp.kind = parse_dgp_kind(e.at("dgp").get<std::string>());
        uc.dgp.center_p = uc.p;
        uc.dgp.validate();
        c.cases.push_back(uc);
      }
      return c;
    }

    c.dgp = parse_dgp_kind(j.at("dgp").get<std::string>());
    c.n = j.at("n").get<std::size_t>();
    c.p = j.at("p").get<double>();
    c.x0 = j.at("x0").get<std::vector<double>>();
    c.deviations = get_or(j, "deviations", std::vector<double>{});
    c.joint_mode = parse_joint_mode(get_or<std::string>(j, "joint_mode", "bonferroni"));
    for (const auto& e : j.at("designs")) {
      Design d;
      d.noise = parse_dgp_kind(get_or<std::string>(e, "noise", "normal"));
      d.heteroskedastic = get_or(e, "heteroskedastic", false);
      d.scale = get_or(e, "scale", -1.0);
      c.designs.push_back(d);
    }
    if (c.designs.empty())
      c.designs.push_back({});
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw DomainError(std::string("malformed simulation config: ") + e.what());
  }
}

std::vector<std::string> builtin_config_names()
{
  std::vector<std::string> names;
  for (const auto& [name, text] : embedded_configs())
    names.push_back(name);
  return names;
}

SimConfig builtin_config(const std::string& name)
{
  const auto& configs = embedded_configs();
  auto it = configs.find(name);
  if (it == configs.end())
    it = configs.find("table" + name);
  if (it == configs.end()) {
    std::string known;
    for (const auto& n : builtin_config_names())
      known += (known.empty() ? "" : ", ") + n;
    throw DomainError("unknown table '" + name + "'; known: " + known);
  }
  return parse_sim_config(Json::parse(it->second));
}

Json run_sim_config(const SimConfig& config, const SimRunOptions& options)
{
  std::vector<std::string> methods = config.methods;
  if (!options.rows.empty() && options.rows != "all") {
    check_method(options.rows);
    methods = { options.rows };
  }
  const std::size_t reps = options.reps > 0 ? options.reps : config.reps;

  Json rows = Json::array();
  auto report_fields = [&](Json& row, const SimulationReport& r) {
    row["cp"] = number(r.cp);
    row["too_low"] = number(r.too_low);
    row["too_high"] = number(r.too_high);
    row["median_length"] = number(r.median_length);
    row["mc_se"] = number(r.mc_se);
    row["replications"] = r.replications;
    row["failures"] = r.failures;
    row["seed"] = r.seed;
  };

  if (!config.conditional) {
    for (const auto& c : config.cases) {
      for (const auto& m : methods) {
        const QuantileRequest req{ c.p, config.alpha, config.side, m == "calib", 0.5 };
        const SimulationReport r = run_unconditional(c.dgp, c.n, req, reps, options.seed, options.threads);
        Json row;
        row["config"] = config.name;
        row["method"] = m;
        row["dgp"] = std::string(to_string(c.dgp.kind));
        row["n"] = c.n;
        row["p"] = number(c.p);
        row["alpha"] = number(config.alpha);
        row["side"] = std::string(to_string(config.side));
        report_fields(row, r);
        rows.push_back(std::move(row));
      }
    }
    return rows;
  }

  for (const auto& d : config.designs) {
    Dgp dgp;
    dgp.kind = config.dgp;
    dgp.noise = d.noise;
    dgp.heteroskedastic = d.heteroskedastic;
    dgp.scale = d.scale;
    dgp.center_p = config.p;
    dgp.validate();
    for (const auto& m : methods) {
      const QuantileRequest req{ config.p, config.alpha, config.side, m == "calib", 0.5 };
      ConditionalSimOptions opt;
      opt.deviations = config.deviations;
      opt.joint_mode = config.joint_mode;
      const ConditionalSimulation sim =
        run_conditional(dgp, config.n, config.x0, req, reps, options.seed, opt, options.threads);
      for (const auto& pt : sim.points) {
        Json row;
        row["config"] = config.name;
        row["method"] = m;
        row["dgp"] = std::string(to_string(dgp.kind));
        row["noise"] = std::string(to_string(dgp.noise));
        row["heteroskedastic"] = dgp.heteroskedastic;
        row["n"] = config.n;
        row["p"] = number(config.p);
        row["alpha"] = number(config.alpha);
        row["side"] = std::string(to_string(config.side));
        row["x0"] = number(pt.x0);
        row["truth"] = number(pt.truth);
        report_fields(row, pt.report);
        row["median_h"] = number(pt.median_h);
        row["median_local_n"] = number(pt.median_local_n);
        if (!sim.deviations.empty()) {
          Json dev = Json::array();
          Json rej = Json::array();
          Json joint = Json::array();
          for (std::size_t k = 0; k < sim.deviations.size(); ++k) {
            dev.push_back(number(sim.deviations[k]));
            rej.push_back(number(pt.rejection[k]));
            joint.push_back(number(sim.joint_rejection[k]));
          }
          row["deviations"] = dev;
          row["rejection"] = rej;
          row["joint_rejection"] = joint;
          row["joint_mode"] = std::string(to_string(config.joint_mode));
          row["joint_failures"] = sim.joint_failures;
        }
        rows.push_back(std::move(row));
      }
    }
  }
  return rows;
}

} // namespace qlstat::cli
