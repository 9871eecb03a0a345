#include "zebris/config_io.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "zebris/errors.hpp"

namespace zebris {

using nlohmann::json;

namespace {

// Reads an object's keys into typed fields and rejects leftovers.
class ObjectReader {
 public:
  ObjectReader(const json& j, std::string where) : j_(j), where_(std::move(where)) {
    if (!j_.is_object()) throw ConfigError(where_ + " must be an object");
  }

  template <typename T>
  void get(const std::string& key, T& out) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    try {
      out = j_.at(key).get<T>();
    } catch (const json::exception& e) {
      throw ConfigError(where_ + "." + key + ": " + e.what());
    }
  }

  void range(const std::string& key, Range& out) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    const auto& v = j_.at(key);
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
      throw ConfigError(where_ + "." + key + " must be a [lo, hi] pair of numbers");
    }
    out = Range{v[0].get<double>(), v[1].get<double>()};
  }

  const json* child(const std::string& key) {
    seen_.insert(key);
    return j_.contains(key) ? &j_.at(key) : nullptr;
  }

  void finish() const {
    for (const auto& [key, _] : j_.items()) {
      if (!seen_.count(key)) throw ConfigError("unknown key " + where_ + "." + key);
    }
  }

 private:
  const json& j_;
  std::string where_;
  std::set<std::string> seen_;
};

json range_json(const Range& r) { return json::array({r.lo, r.hi}); }

std::string strategy_name(DpStrategy s) {
  switch (s) {
    case DpStrategy::kAuto: return "auto";
    case DpStrategy::kDense: return "dense";
    case DpStrategy::kSparse: return "sparse";
  }
  return "auto";
}

DpStrategy strategy_from(const std::string& s) {
  if (s == "auto") return DpStrategy::kAuto;
  if (s == "dense") return DpStrategy::kDense;
  if (s == "sparse") return DpStrategy::kSparse;
  throw ConfigError("clearing.strategy must be one of auto, dense, sparse");
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t k = 0; k < line.size(); ++k) {
    const char c = line[k];
    if (quoted) {
      if (c == '"' && k + 1 < line.size() && line[k + 1] == '"') {
        cur += '"';
        ++k;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  fields.push_back(cur);
  return fields;
}

}  // namespace

ScenarioConfig scenario_from_json(const json& j, const std::filesystem::path& base_dir) {
  ScenarioConfig s;
  ObjectReader r(j, "scenario");
  r.get("num_sellers", s.num_sellers);
  r.get("horizon", s.horizon);
  r.get("buyer_pool_size", s.buyer_pool_size);
  r.get("activation_probability", s.activation_probability);
  r.get("activation_profile", s.activation_profile);
  std::string profile_file;
  r.get("activation_profile_file", profile_file);
  if (!profile_file.empty()) {
    std::filesystem::path p(profile_file);
    if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
    s.activation_profile = load_activation_profile(p);
  }
  if (const json* b = r.child("buyers")) {
    ObjectReader br(*b, "scenario.buyers");
    br.range("data_size_mb", s.buyers.data_size_mb);
    br.range("workload_gcycles", s.buyers.workload_gcycles);
    br.range("deadline_s", s.buyers.deadline_s);
    br.range("privacy_sensitivity", s.buyers.privacy_sensitivity);
    br.range("min_security", s.buyers.min_security);
    br.range("gross_valuation", s.buyers.gross_valuation);
    br.range("delay_penalty", s.buyers.delay_penalty);
    br.range("privacy_penalty", s.buyers.privacy_penalty);
    br.finish();
  }
  if (const json* sj = r.child("sellers")) {
    ObjectReader sr(*sj, "scenario.sellers");
    sr.range("bandwidth_mhz", s.sellers.bandwidth_mhz);
    sr.range("compute_gcps", s.sellers.compute_gcps);
    sr.range("initial_posture", s.sellers.initial_posture);
    sr.range("base_ask", s.sellers.base_ask);
    sr.range("unit_bandwidth_cost", s.sellers.unit_bandwidth_cost);
    sr.range("unit_compute_cost", s.sellers.unit_compute_cost);
    sr.get("verification_levels", s.sellers.verification_levels);
    sr.finish();
  }
  r.range("sinr_db", s.sinr_db);
  if (const json* g = r.child("package_grid")) {
    ObjectReader gr(*g, "scenario.package_grid");
    gr.get("bandwidth_levels", s.package_grid.bandwidth_levels);
    gr.get("compute_levels", s.package_grid.compute_levels);
    gr.get("verification_levels", s.package_grid.verification_levels);
    gr.finish();
  }
  r.get("resample_base_ask", s.resample_base_ask);
  r.get("snap_capacity_to_grid", s.snap_capacity_to_grid);
  r.get("rng_seed", s.rng_seed);
  if (const json* m = r.child("mechanism")) {
    ObjectReader mr(*m, "scenario.mechanism");
    auto& c = s.mechanism;
    mr.get("delay_verif_coeff", c.delay_verif_coeff);
    mr.get("delay_posture_coeff", c.delay_posture_coeff);
    mr.get("compliance_weight", c.compliance_weight);
    mr.get("zt_verif_cost", c.zt_verif_cost);
    mr.get("zt_posture_cost", c.zt_posture_cost);
    if (const json* w = mr.child("refund_weights")) {
      if (!w->is_array() || w->size() != 3) {
        throw ConfigError("scenario.mechanism.refund_weights must be [eta1, eta2, eta3]");
      }
      c.refund_weight_auth = (*w)[0].get<double>();
      c.refund_weight_policy = (*w)[1].get<double>();
      c.refund_weight_sla = (*w)[2].get<double>();
    }
    mr.get("deposit_verif_coeff", c.deposit_verif_coeff);
    mr.get("deposit_posture_coeff", c.deposit_posture_coeff);
    mr.get("deposit_cap_ratio", c.deposit_cap_ratio);
    mr.get("compensation_share", c.compensation_share);
    mr.get("posture_step", c.posture_step);
    mr.finish();
  }
  if (const json* e = r.child("effort")) {
    ObjectReader er(*e, "scenario.effort");
    er.get("tau0", s.effort.tau0);
    er.get("tau1", s.effort.tau1);
    er.get("tau2", s.effort.tau2);
    er.get("auth_events_per_trade", s.effort.auth_events_per_trade);
    er.get("policy_checks_per_trade", s.effort.policy_checks_per_trade);
    er.get("violation_scale", s.effort.violation_scale);
    er.get("delay_inflation", s.effort.delay_inflation);
    er.finish();
  }
  if (const json* c = r.child("clearing")) {
    ObjectReader cr(*c, "scenario.clearing");
    cr.get("quantum_bandwidth", s.clearing.quantum.bandwidth);
    cr.get("quantum_compute", s.clearing.quantum.compute);
    cr.get("state_cap", s.clearing.state_cap);
    cr.get("dense_limit", s.clearing.dense_limit);
    std::string strategy = strategy_name(s.clearing.strategy);
    cr.get("strategy", strategy);
    s.clearing.strategy = strategy_from(strategy);
    cr.finish();
  }
  r.finish();
  return s;
}

json scenario_to_json(const ScenarioConfig& s) {
  json j;
  j["num_sellers"] = s.num_sellers;
  j["horizon"] = s.horizon;
  j["buyer_pool_size"] = s.buyer_pool_size;
  j["activation_probability"] = s.activation_probability;
  j["activation_profile"] = s.activation_profile;
  j["buyers"] = {
      {"data_size_mb", range_json(s.buyers.data_size_mb)},
      {"workload_gcycles", range_json(s.buyers.workload_gcycles)},
      {"deadline_s", range_json(s.buyers.deadline_s)},
      {"privacy_sensitivity", range_json(s.buyers.privacy_sensitivity)},
      {"min_security", range_json(s.buyers.min_security)},
      {"gross_valuation", range_json(s.buyers.gross_valuation)},
      {"delay_penalty", range_json(s.buyers.delay_penalty)},
      {"privacy_penalty", range_json(s.buyers.privacy_penalty)},
  };
  j["sellers"] = {
      {"bandwidth_mhz", range_json(s.sellers.bandwidth_mhz)},
      {"compute_gcps", range_json(s.sellers.compute_gcps)},
      {"initial_posture", range_json(s.sellers.initial_posture)},
      {"base_ask", range_json(s.sellers.base_ask)},
      {"unit_bandwidth_cost", range_json(s.sellers.unit_bandwidth_cost)},
      {"unit_compute_cost", range_json(s.sellers.unit_compute_cost)},
      {"verification_levels", s.sellers.verification_levels},
  };
  j["sinr_db"] = range_json(s.sinr_db);
  j["package_grid"] = {{"bandwidth_levels", s.package_grid.bandwidth_levels},
                       {"compute_levels", s.package_grid.compute_levels},
                       {"verification_levels", s.package_grid.verification_levels}};
  j["resample_base_ask"] = s.resample_base_ask;
  j["snap_capacity_to_grid"] = s.snap_capacity_to_grid;
  j["rng_seed"] = s.rng_seed;
  const auto& c = s.mechanism;
  j["mechanism"] = {
      {"delay_verif_coeff", c.delay_verif_coeff},
      {"delay_posture_coeff", c.delay_posture_coeff},
      {"compliance_weight", c.compliance_weight},
      {"zt_verif_cost", c.zt_verif_cost},
      {"zt_posture_cost", c.zt_posture_cost},
      {"refund_weights", {c.refund_weight_auth, c.refund_weight_policy, c.refund_weight_sla}},
      {"deposit_verif_coeff", c.deposit_verif_coeff},
      {"deposit_posture_coeff", c.deposit_posture_coeff},
      {"deposit_cap_ratio", c.deposit_cap_ratio},
      {"compensation_share", c.compensation_share},
      {"posture_step", c.posture_step},
  };
  j["effort"] = {
      {"tau0", s.effort.tau0},
      {"tau1", s.effort.tau1},
      {"tau2", s.effort.tau2},
      {"auth_events_per_trade", s.effort.auth_events_per_trade},
      {"policy_checks_per_trade", s.effort.policy_checks_per_trade},
      {"violation_scale", s.effort.violation_scale},
      {"delay_inflation", s.effort.delay_inflation},
  };
  j["clearing"] = {
      {"quantum_bandwidth", s.clearing.quantum.bandwidth},
      {"quantum_compute", s.clearing.quantum.compute},
      {"state_cap", s.clearing.state_cap},
      {"dense_limit", s.clearing.dense_limit},
      {"strategy", strategy_name(s.clearing.strategy)},
  };
  return j;
}

RunPlan plan_from_json(const json& j, const std::filesystem::path& base_dir) {
  RunPlan p;
  ObjectReader r(j, "plan");
  if (const json* s = r.child("scenario")) p.scenario = scenario_from_json(*s, base_dir);
  r.get("mechanisms", p.mechanisms);
  r.get("buyer_pool_sizes", p.buyer_pool_sizes);
  r.get("episodes_per_cell", p.episodes_per_cell);
  r.get("base_seed", p.base_seed);
  std::string out = p.output_dir.string();
  r.get("output_dir", out);
  p.output_dir = out;
  r.get("write_trades_audit", p.write_trades_audit);
  r.get("write_postures", p.write_postures);
  r.get("threads", p.threads);
  r.finish();
  return p;
}

json plan_to_json(const RunPlan& p) {
  return json{{"scenario", scenario_to_json(p.scenario)},
              {"mechanisms", p.mechanisms},
              {"buyer_pool_sizes", p.buyer_pool_sizes},
              {"episodes_per_cell", p.episodes_per_cell},
              {"base_seed", p.base_seed},
              {"output_dir", p.output_dir.string()},
              {"write_trades_audit", p.write_trades_audit},
              {"write_postures", p.write_postures},
              {"threads", p.threads}};
}

RunPlan load_plan(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open plan file: " + path.string());
  json j;
  try {
    j = json::parse(in, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  const auto base = path.parent_path();
  if (j.is_object() && !j.contains("scenario")) {
    RunPlan plan;
    plan.scenario = scenario_from_json(j, base);
    return plan;
  }
  return plan_from_json(j, base);
}

std::string format_number(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

std::string summary_csv(const std::vector<SummaryRow>& rows) {
  std::string out = "mechanism,buyer_pool_size,metric,mean,sd,ci95_half_width,n\n";
  for (const auto& r : rows) {
    out += csv_escape(r.mechanism) + ',' + std::to_string(r.buyer_pool_size) + ',' +
           std::string(metric_name(r.metric)) + ',' + format_number(r.stat.mean) + ',' +
           format_number(r.stat.sd) + ',' + format_number(r.stat.half_width) + ',' +
           std::to_string(r.stat.n) + '\n';
  }
  return out;
}

json summary_json(const std::vector<SummaryRow>& rows) {
  json arr = json::array();
  for (const auto& r : rows) {
    arr.push_back({{"mechanism", r.mechanism},
                   {"buyer_pool_size", r.buyer_pool_size},
                   {"metric", std::string(metric_name(r.metric))},
                   {"mean", r.stat.mean},
                   {"sd", r.stat.sd},
                   {"ci95_half_width", r.stat.half_width},
                   {"n", r.stat.n}});
  }
  return arr;
}

std::string trades_audit_header() {
  return "mechanism,buyer_pool_size,episode,round,buyer_id,seller_id,bandwidth,compute,"
         "verification,posture,margin,effective_valuation,effective_ask,reference_margin,"
         "deposit_enabled,deposit_cap_ratio,price,deposit,auth_score,policy_score,sla_score,"
         "refund_ratio,refunded,forfeited,buyer_compensation,platform_cut,buyer_utility,"
         "seller_utility,buyer_payment,seller_receipt,realized_delay\n";
}

std::string trades_audit_row(const AuditedTrade& a, const TradeRecord* t) {
  const auto& s = a.settlement;
  auto n = [](double v) { return format_number(v); };
  std::string row = csv_escape(a.mechanism) + ',' + std::to_string(a.buyer_pool_size) + ',' +
                    std::to_string(a.episode) + ',' + std::to_string(a.round) + ',' +
                    std::to_string(a.buyer_id) + ',' + std::to_string(a.seller_id) + ',';
  if (t) {
    row += n(t->cleared.package.bandwidth) + ',' + n(t->cleared.package.compute) + ',' +
           n(t->cleared.package.verification) + ',' + n(t->posture) + ',';
  } else {
    row += ",,,,";
  }
  row += n(a.margin) + ',' + n(a.effective_valuation) + ',' + n(a.effective_ask) + ',' +
         (t ? n(t->reference.margin) : std::string()) + ',' + (a.deposit_enabled ? "1" : "0") +
         ',' + n(a.deposit_cap_ratio) + ',' + n(s.price) + ',' + n(s.deposit) + ',' +
         n(s.scores.authentication) + ',' + n(s.scores.policy) + ',' + n(s.scores.sla) + ',' +
         n(s.refund_ratio) + ',' + n(s.refunded) + ',' + n(s.forfeited) + ',' +
         n(s.buyer_compensation) + ',' + n(s.platform_cut) + ',' + n(s.buyer_utility) + ',' +
         n(s.seller_utility) + ',' + n(s.price) + ',' + n(s.price - s.forfeited) + ',' +
         (t ? n(t->measurement.realized_delay) : std::string()) + '\n';
  return row;
}

std::vector<AuditedTrade> read_trades_audit(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open trades audit: " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw IoError(path.string() + ": empty file");
  const auto header = split_csv_line(line);
  std::map<std::string, std::size_t> col;
  for (std::size_t k = 0; k < header.size(); ++k) col[header[k]] = k;
  const char* required[] = {"mechanism", "round", "buyer_id", "seller_id", "margin",
                            "effective_valuation", "effective_ask", "price", "deposit",
                            "refund_ratio", "refunded", "forfeited", "buyer_compensation",
                            "platform_cut", "buyer_utility", "seller_utility",
                            "deposit_enabled", "deposit_cap_ratio"};
  for (const char* name : required) {
    if (!col.count(name)) throw IoError(path.string() + ": missing column " + name);
  }

  std::vector<AuditedTrade> trades;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto f = split_csv_line(line);
    if (f.size() != header.size()) {
      throw IoError(path.string() + ":" + std::to_string(line_no) + ": expected " +
                    std::to_string(header.size()) + " fields");
    }
    auto num = [&](const char* name) {
      const auto& text = f[col.at(name)];
      double v = 0.0;
      const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
      if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
        throw IoError(path.string() + ":" + std::to_string(line_no) + ": bad number in " + name);
      }
      return v;
    };
    auto integer = [&](const char* name) { return static_cast<int>(num(name)); };
    AuditedTrade a;
    a.mechanism = f[col.at("mechanism")];
    if (col.count("buyer_pool_size")) a.buyer_pool_size = integer("buyer_pool_size");
    if (col.count("episode")) a.episode = integer("episode");
    a.round = integer("round");
    a.buyer_id = integer("buyer_id");
    a.seller_id = integer("seller_id");
    a.margin = num("margin");
    a.effective_valuation = num("effective_valuation");
    a.effective_ask = num("effective_ask");
    a.deposit_enabled = num("deposit_enabled") != 0.0;
    a.deposit_cap_ratio = num("deposit_cap_ratio");
    auto& s = a.settlement;
    s.price = num("price");
    s.deposit = num("deposit");
    s.refund_ratio = num("refund_ratio");
    s.refunded = num("refunded");
    s.forfeited = num("forfeited");
    s.buyer_compensation = num("buyer_compensation");
    s.platform_cut = num("platform_cut");
    s.buyer_utility = num("buyer_utility");
    s.seller_utility = num("seller_utility");
    trades.push_back(std::move(a));
  }
  return trades;
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out << content;
  if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace zebris
