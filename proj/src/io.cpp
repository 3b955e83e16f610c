#include "smoothtwin/io.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <system_error>
#include <unistd.h>

namespace smoothtwin {

Json factorization_to_json(const SignedFactorization& f) {
  Json out = Json::array();
  for (const auto& [p, e] : f.entries()) out.push_back({p, e});
  return out;
}

Json twin_to_json(const TwinRecord& rec, std::uint64_t B) {
  const auto& pv = rec.provenance;
  Json prov = {{"source", pv.source}};
  if (pv.source == "enumeration" || pv.source == "sieve" || pv.source == "basis") {
    prov["trial"] = pv.trial;
    prov["trial_seed"] = pv.trial_seed;
    prov["guessed"] = pv.guessed;
    prov["alpha_log2"] = pv.alpha_log2;
    prov["vector_rank"] = pv.vector_rank;
  }
  return Json{{"r", rec.twin.r.get_str()},
              {"fac_r", factorization_to_json(rec.twin.fac_r)},
              {"fac_r1", factorization_to_json(rec.twin.fac_r1)},
              {"B", B},
              {"bits", rec.twin.bits},
              {"provenance", prov}};
}

TwinRecord twin_from_json(const Json& j, std::uint64_t* B) {
  if (!j.is_object() || !j.contains("r") || !j.contains("B"))
    throw std::invalid_argument("twin record needs the keys r and B");
  const Json& rj = j.at("r");
  const BigInt r = parse_bigint(rj.is_string() ? rj.get<std::string>() : rj.dump());
  const auto bound = j.at("B").get<std::uint64_t>();
  TwinRecord rec;
  rec.twin = make_twin(r, bound);
  if (j.contains("provenance")) {
    const Json& p = j.at("provenance");
    rec.provenance.source = p.value("source", std::string());
    rec.provenance.trial = p.value("trial", 0);
    rec.provenance.trial_seed = p.value("trial_seed", std::uint64_t{0});
    rec.provenance.guessed = p.value("guessed", std::vector<std::uint64_t>{});
    rec.provenance.alpha_log2 = p.value("alpha_log2", 0.0);
    rec.provenance.vector_rank = p.value("vector_rank", 0L);
  }
  if (B) *B = bound;
  return rec;
}

void write_twins(std::ostream& os, const TwinSet& ts) {
  for (const auto& rec : ts.records()) os << twin_to_json(rec, ts.bound).dump() << '\n';
}

std::string twins_to_string(const TwinSet& ts) {
  std::ostringstream os;
  write_twins(os, ts);
  return os.str();
}

TwinSet read_twins(std::istream& is) {
  TwinSet ts;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      std::uint64_t B = 0;
      TwinRecord rec = twin_from_json(Json::parse(line), &B);
      ts.bound = std::max(ts.bound, B);
      ts.insert(std::move(rec));
    } catch (const std::exception& ex) {
      throw std::invalid_argument("line " + std::to_string(lineno) + ": " + ex.what());
    }
  }
  return ts;
}

TwinSet read_twins_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open " + path.string());
  return read_twins(in);
}

SearchConfig config_from_json(const Json& j) {
  static const std::set<std::string> known = {
      "B",      "alpha_log2_grid", "e",         "eta",          "pow2_f",         "guess_k",
      "lift_l", "protected_prefix_bound",       "trials",       "seed",           "radius_factor",
      "mode",   "precision_bits",  "bkz_block", "bkz_tours",    "node_budget",    "sieve_saturation"};
  if (!j.is_object()) throw std::invalid_argument("config must be a JSON object");
  for (const auto& [key, _] : j.items())
    if (!known.count(key)) throw std::invalid_argument("unknown config key '" + key + "'");
  SearchConfig c;
  c.B = j.at("B").get<std::uint64_t>();
  c.alpha_log2_grid = j.value("alpha_log2_grid", c.alpha_log2_grid);
  c.e = j.value("e", c.e);
  c.eta = j.value("eta", c.eta);
  c.pow2_f = j.value("pow2_f", c.pow2_f);
  c.guess_k = j.value("guess_k", c.guess_k);
  c.lift_l = j.value("lift_l", c.lift_l);
  c.protected_prefix_bound = j.value("protected_prefix_bound", c.protected_prefix_bound);
  c.trials = j.value("trials", c.trials);
  c.seed = j.value("seed", c.seed);
  c.radius_factor = j.value("radius_factor", c.radius_factor);
  const std::string mode = j.value("mode", std::string("enumeration"));
  if (mode == "enumeration")
    c.mode = HarvestMode::enumeration;
  else if (mode == "sieve")
    c.mode = HarvestMode::sieve;
  else
    throw std::invalid_argument("mode must be 'enumeration' or 'sieve'");
  c.precision_bits = j.value("precision_bits", c.precision_bits);
  c.bkz_block = j.value("bkz_block", c.bkz_block);
  c.bkz_tours = j.value("bkz_tours", c.bkz_tours);
  c.node_budget = j.value("node_budget", c.node_budget);
  c.sieve_saturation = j.value("sieve_saturation", c.sieve_saturation);
  return c;
}

Json config_to_json(const SearchConfig& c) {
  return Json{{"B", c.B},
              {"alpha_log2_grid", c.alpha_log2_grid},
              {"e", c.e},
              {"eta", c.eta},
              {"pow2_f", c.pow2_f},
              {"guess_k", c.guess_k},
              {"lift_l", c.lift_l},
              {"protected_prefix_bound", c.protected_prefix_bound},
              {"trials", c.trials},
              {"seed", c.seed},
              {"radius_factor", c.radius_factor},
              {"mode", c.mode == HarvestMode::sieve ? "sieve" : "enumeration"},
              {"precision_bits", c.precision_bits},
              {"bkz_block", c.bkz_block},
              {"bkz_tours", c.bkz_tours},
              {"node_budget", c.node_budget},
              {"sieve_saturation", c.sieve_saturation}};
}

Json report_to_json(const AnalysisReport& rep) {
  return Json{{"beta1", rep.beta1},
              {"beta2", rep.beta2},
              {"gamma", rep.gamma},
              {"alpha_log2", rep.alpha_log2},
              {"alpha_opt_log2", rep.alpha_opt_log2},
              {"gh", rep.gh},
              {"norm", rep.vector_norm},
              {"ratio", rep.ratio},
              {"ratio_stirling", rep.ratio_stirling}};
}

Json boost_to_json(const BoostReport& rep) {
  Json rough = Json::array();
  for (const auto& c : rep.rough_cofactors) rough.push_back(c.get_str());
  return Json{{"r", rep.r.get_str()},
              {"p", rep.p.get_str()},
              {"is_prime", rep.is_prime},
              {"f", rep.f},
              {"val2_total", rep.val2_total},
              {"T", rep.T.get_str()},
              {"T_factorization", factorization_to_json(rep.T_factorization)},
              {"rough_cofactors", rough},
              {"meets_T_bound", rep.meets_T_bound},
              {"meets_torsion", rep.meets_torsion},
              {"f_below_quarter", rep.f_below_quarter},
              {"B_used", rep.B_used}};
}

void atomic_write(const std::filesystem::path& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path dir = path.has_parent_path() ? path.parent_path() : fs::path(".");
  if (!dir.empty()) fs::create_directories(dir);
  const fs::path tmp = dir / ("." + path.filename().string() + ".tmp" + std::to_string(::getpid()));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp);
    throw std::runtime_error("cannot move result into " + path.string() + ": " + ec.message());
  }
}

}  // namespace smoothtwin
