#include "trajbench/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

#include <json.hpp>

#include "trajbench/ingest.hpp"
#include "trajbench/metrics.hpp"
#include "trajbench/version.hpp"

namespace tb::report {

namespace {

using json = nlohmann::ordered_json;

std::string f6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

std::string f3(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.3f", v);
  return buf;
}

std::string fg(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

struct Accumulator {
  int n = 0;          // scenarios contributing to bounded scores
  int n_error = 0;    // scenarios contributing to ADE/FDE
  double fde = 0.0, ade = 0.0, mr = 0.0, se = 0.0, ac = 0.0, wo = 0.0;

  void add_scored(const ScenarioResult& r) {
    ++n;
    ++n_error;
    fde += r.fde;
    ade += r.ade;
    mr += r.mr;
    se += r.se;
    ac += r.ac;
    wo += r.wo;
  }

  void add_failure() {
    ++n;
    mr += 100.0;
  }

  GroupStats finish(const std::string& group, const MetricConfig& cfg) const {
    GroupStats g;
    g.group = group;
    g.n = n;
    if (n_error > 0) {
      g.fde = fde / n_error;
      g.ade = ade / n_error;
    }
    if (n > 0) {
      g.mr = mr / n;
      g.se = se / n;
      g.ac = ac / n;
      g.wo = cfg.aggregation == Aggregation::per_scenario_mean
                 ? wo / n
                 : metrics::weighted_overall(g.ade, g.fde, g.mr, g.se, g.ac,
                                             cfg);
    }
    return g;
  }
};

}  // namespace

std::string to_string(ScenarioStatus s) {
  switch (s) {
    case ScenarioStatus::ok: return "ok";
    case ScenarioStatus::missing: return "missing";
    case ScenarioStatus::failed: return "failed";
  }
  return "?";
}

AggregateReport aggregate(const std::vector<ScenarioRecord>& records,
                          const MetricConfig& cfg, bool score_failures) {
  AggregateReport report;
  report.config = cfg;
  Accumulator all, expl, impl;
  std::map<std::string, Accumulator> by_category;
  for (const auto& rec : records) {
    const bool scored = rec.status == ScenarioStatus::ok;
    if (scored) {
      ++report.n_scored;
    } else {
      if (rec.status == ScenarioStatus::missing)
        ++report.n_missing;
      else
        ++report.n_failed;
      if (!score_failures) continue;
    }
    auto apply = [&](Accumulator& acc) {
      if (scored)
        acc.add_scored(rec.result);
      else
        acc.add_failure();
    };
    apply(all);
    apply(rec.target_mode == TargetMode::explicit_target ? expl : impl);
    apply(by_category[rec.category]);
  }
  report.rows.push_back(all.finish("all", cfg));
  report.rows.push_back(expl.finish("explicit", cfg));
  report.rows.push_back(impl.finish("implicit", cfg));
  for (const auto& [category, acc] : by_category)
    report.rows.push_back(acc.finish("category:" + category, cfg));
  return report;
}

std::string aggregate_csv(const AggregateReport& report) {
  std::string out;
  out += "# trajbench " + std::string(kVersion) + "\n";
  out += "# config: " + config_to_json(report.config) + "\n";
  out += "# scored: " + std::to_string(report.n_scored) +
         " missing: " + std::to_string(report.n_missing) +
         " failed: " + std::to_string(report.n_failed) + "\n";
  out += "group,n,fde,ade,mr,se,ac,wo\n";
  for (const auto& g : report.rows) {
    out += g.group + "," + std::to_string(g.n) + "," + f6(g.fde) + "," +
           f6(g.ade) + "," + f6(g.mr) + "," + f6(g.se) + "," + f6(g.ac) + "," +
           f6(g.wo) + "\n";
  }
  return out;
}

ModelRun load_aggregate_csv(const std::filesystem::path& path,
                            const std::string& model) {
  const std::string text = ingest::read_file(path);
  ModelRun run;
  run.model = model;
  bool have_config = false;
  bool have_all = false;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.rfind("# trajbench ", 0) == 0) {
      run.version = line.substr(12);
      continue;
    }
    if (line.rfind("# config: ", 0) == 0) {
      run.config = config_from_json(line.substr(10));
      have_config = true;
      continue;
    }
    if (line.empty() || line[0] == '#' || line.rfind("group,", 0) == 0)
      continue;
    std::vector<std::string> fields;
    std::istringstream ls(line);
    std::string tok;
    while (std::getline(ls, tok, ',')) fields.push_back(tok);
    if (fields.size() != 8)
      throw ParseError(path.string() + ": malformed row \"" + line + "\"");
    if (fields[0] != "all") continue;
    run.all.group = fields[0];
    run.all.n = std::stoi(fields[1]);
    run.all.fde = std::stod(fields[2]);
    run.all.ade = std::stod(fields[3]);
    run.all.mr = std::stod(fields[4]);
    run.all.se = std::stod(fields[5]);
    run.all.ac = std::stod(fields[6]);
    run.all.wo = std::stod(fields[7]);
    have_all = true;
  }
  if (!have_config)
    throw ParseError(path.string() + ": missing \"# config:\" header");
  if (!have_all)
    throw ParseError(path.string() + ": missing \"all\" group row");
  return run;
}

namespace {

void sort_by_wo(std::vector<ModelRun>& runs) {
  std::stable_sort(runs.begin(), runs.end(),
                   [](const ModelRun& a, const ModelRun& b) {
                     if (a.all.wo != b.all.wo) return a.all.wo > b.all.wo;
                     return a.model < b.model;
                   });
}

}  // namespace

std::string leaderboard_markdown(std::vector<ModelRun> runs) {
  sort_by_wo(runs);
  std::string out;
  out += "| Rank | Model | n | FDE (m) | ADE (m) | MR (%) | SE | AC | WO |\n";
  out += "|-----:|:------|--:|--------:|--------:|-------:|---:|---:|---:|\n";
  int rank = 0;
  for (const auto& r : runs) {
    ++rank;
    out += "| " + std::to_string(rank) + " | " + r.model + " | " +
           std::to_string(r.all.n) + " | " + f3(r.all.fde) + " | " +
           f3(r.all.ade) + " | " + f3(r.all.mr) + " | " + f3(r.all.se) +
           " | " + f3(r.all.ac) + " | " + f3(r.all.wo) + " |\n";
  }
  if (!runs.empty())
    out += "\n_trajbench " + std::string(kVersion) +
           ", config: " + config_to_json(runs.front().config) + "_\n";
  return out;
}

std::string radar_csv(std::vector<ModelRun> runs) {
  sort_by_wo(runs);
  std::string out;
  out += "# trajbench " + std::string(kVersion) + "\n";
  if (!runs.empty())
    out += "# config: " + config_to_json(runs.front().config) + "\n";
  out += "model,wo,fde_score,ade_score,mr_score,se,ac\n";
  for (const auto& r : runs) {
    const auto& cfg = r.config;
    out += r.model + "," + f6(r.all.wo) + "," +
           f6(std::exp(-r.all.fde / cfg.tau_fde)) + "," +
           f6(std::exp(-r.all.ade / cfg.tau_ade)) + "," +
           f6(1.0 - r.all.mr / 100.0) + "," + f6(r.all.se) + "," +
           f6(r.all.ac) + "\n";
  }
  return out;
}

std::string config_to_json(const MetricConfig& cfg) {
  json j;
  j["tau_miss"] = cfg.tau_miss;
  j["sigma_se"] = cfg.sigma_se;
  j["corridor_m"] = cfg.corridor_m;
  j["sigma_min"] = cfg.sigma_min;
  j["sigma_max"] = cfg.sigma_max;
  j["beta"] = cfg.beta;
  j["gamma"] = cfg.gamma;
  j["w_ade"] = cfg.w_ade;
  j["w_fde"] = cfg.w_fde;
  j["w_mr"] = cfg.w_mr;
  j["w_seac"] = cfg.w_seac;
  j["tau_ade"] = cfg.tau_ade;
  j["tau_fde"] = cfg.tau_fde;
  j["n_eval"] = cfg.n_eval;
  j["aggregation"] = to_string(cfg.aggregation);
  j["coverage"] = to_string(cfg.coverage);
  return j.dump();
}

MetricConfig config_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("config snapshot: ") + e.what());
  }
  MetricConfig cfg;
  try {
    cfg.tau_miss = j.at("tau_miss").get<double>();
    cfg.sigma_se = j.at("sigma_se").get<double>();
    cfg.corridor_m = j.at("corridor_m").get<int>();
    cfg.sigma_min = j.at("sigma_min").get<double>();
    cfg.sigma_max = j.at("sigma_max").get<double>();
    cfg.beta = j.at("beta").get<double>();
    cfg.gamma = j.at("gamma").get<double>();
    cfg.w_ade = j.at("w_ade").get<double>();
    cfg.w_fde = j.at("w_fde").get<double>();
    cfg.w_mr = j.at("w_mr").get<double>();
    cfg.w_seac = j.at("w_seac").get<double>();
    cfg.tau_ade = j.at("tau_ade").get<double>();
    cfg.tau_fde = j.at("tau_fde").get<double>();
    cfg.n_eval = j.at("n_eval").get<int>();
    const auto agg = j.at("aggregation").get<std::string>();
    if (agg == "per_scenario_mean")
      cfg.aggregation = Aggregation::per_scenario_mean;
    else if (agg == "aggregate_then_score")
      cfg.aggregation = Aggregation::aggregate_then_score;
    else
      throw ParseError("config snapshot: unknown aggregation \"" + agg + "\"");
    const auto cov = j.at("coverage").get<std::string>();
    if (cov == "exists")
      cfg.coverage = CoverageSemantics::exists;
    else if (cov == "nearest")
      cfg.coverage = CoverageSemantics::nearest;
    else
      throw ParseError("config snapshot: unknown coverage \"" + cov + "\"");
  } catch (const json::exception& e) {
    throw ParseError(std::string("config snapshot: ") + e.what());
  }
  return cfg;
}

std::optional<std::string> config_mismatch(const MetricConfig& a,
                                           const MetricConfig& b) {
  auto num = [](const char* name, double x, double y)
      -> std::optional<std::string> {
    if (x != y)
      return std::string(name) + " " + fg(x) + " vs " + fg(y);
    return std::nullopt;
  };
  if (auto m = num("tau_miss", a.tau_miss, b.tau_miss)) return m;
  if (auto m = num("sigma_se", a.sigma_se, b.sigma_se)) return m;
  if (auto m = num("corridor_m", a.corridor_m, b.corridor_m)) return m;
  if (auto m = num("sigma_min", a.sigma_min, b.sigma_min)) return m;
  if (auto m = num("sigma_max", a.sigma_max, b.sigma_max)) return m;
  if (auto m = num("beta", a.beta, b.beta)) return m;
  if (auto m = num("gamma", a.gamma, b.gamma)) return m;
  if (auto m = num("w_ade", a.w_ade, b.w_ade)) return m;
  if (auto m = num("w_fde", a.w_fde, b.w_fde)) return m;
  if (auto m = num("w_mr", a.w_mr, b.w_mr)) return m;
  if (auto m = num("w_seac", a.w_seac, b.w_seac)) return m;
  if (auto m = num("tau_ade", a.tau_ade, b.tau_ade)) return m;
  if (auto m = num("tau_fde", a.tau_fde, b.tau_fde)) return m;
  if (auto m = num("n_eval", a.n_eval, b.n_eval)) return m;
  if (a.aggregation != b.aggregation)
    return "aggregation " + to_string(a.aggregation) + " vs " +
           to_string(b.aggregation);
  if (a.coverage != b.coverage)
    return "coverage " + to_string(a.coverage) + " vs " +
           to_string(b.coverage);
  return std::nullopt;
}

}  // namespace tb::report
