#include <chrono>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <mpfr.h>

#include "CLI11.hpp"
#include "smoothtwin/arith.hpp"
#include "smoothtwin/classical.hpp"
#include "smoothtwin/dickman.hpp"
#include "smoothtwin/io.hpp"
#include "smoothtwin/lattice.hpp"
#include "smoothtwin/search.hpp"
#include "smoothtwin/sqisign.hpp"

#ifndef SMOOTHTWIN_VERSION
#define SMOOTHTWIN_VERSION "0.0.0"
#endif

using namespace smoothtwin;

namespace {

constexpr int kOk = 0;
constexpr int kDomain = 1;
constexpr int kPartial = 2;
constexpr int kUsage = 64;

struct Run {
  std::string subcommand;
  std::vector<std::string> argv;
  std::string output;
  int workers = 0;
  Json config = Json::object();
  Json summary = Json::object();
  std::vector<std::string> log;
};

int resolve_workers(int flag) {
  if (flag > 0) return flag;
  if (const char* env = std::getenv("SMOOTHTWIN_WORKERS")) {
    try {
      const int w = std::stoi(env);
      if (w > 0) return w;
    } catch (const std::exception&) {
    }
    throw std::invalid_argument(std::string("SMOOTHTWIN_WORKERS must be a positive integer, got '") + env + "'");
  }
  return 1;
}

std::string utc_now() {
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

Json manifest(const Run& run, int code) {
  return Json{{"tool", "smoothtwin"},
              {"version", SMOOTHTWIN_VERSION},
              {"subcommand", run.subcommand},
              {"argv", run.argv},
              {"config", run.config},
              {"workers", run.workers},
              {"gmp", gmp_version},
              {"mpfr", mpfr_get_version()},
              {"created", utc_now()},
              {"exit_code", code},
              {"summary", run.summary},
              {"log", run.log}};
}

// Results go to the output path (plus manifest) or to stdout.
void emit(const Run& run, const std::string& content, int code) {
  if (run.output.empty()) {
    std::cout << content;
    std::cout.flush();
    return;
  }
  atomic_write(run.output, content);
  atomic_write(run.output + ".manifest.json", manifest(run, code).dump(2) + "\n");
}

std::string lines(const std::vector<Json>& rows) {
  std::string out;
  for (const auto& r : rows) out += r.dump() + "\n";
  return out;
}

TwinSet load_twins(const std::string& path) {
  if (path == "-") return read_twins(std::cin);
  return read_twins_file(path);
}

int cmd_estimate(Run& run, std::uint64_t B, int m) {
  const auto est = estimate_optimal(B, m);
  run.config = {{"B", B}, {"m", m}};
  Json j{{"B", B}, {"m", m}, {"u", est.u}, {"log2_r", est.log2_r}, {"iterations", est.iterations}};
  run.summary = j;
  emit(run, j.dump() + "\n", kOk);
  return kOk;
}

int cmd_rho(Run& run, const std::vector<double>& us) {
  std::vector<Json> rows;
  for (double u : us) rows.push_back({{"u", u}, {"rho", rho(u)}, {"log_rho", RhoEvaluator::shared().log_rho(u)}});
  run.config = {{"u", us}};
  run.summary = {{"count", rows.size()}};
  emit(run, lines(rows), kOk);
  return kOk;
}

int cmd_search(Run& run, SearchConfig cfg, const std::string& histogram_path) {
  run.config = config_to_json(cfg);
  TwinSet ts = run_search(cfg, run.workers);
  const auto pw = pow2_report(ts, cfg.pow2_f);
  Json hist = Json::array();
  if (!ts.empty())
    for (const auto& b : size_histogram(ts)) hist.push_back({{"lo", b.lo}, {"hi", b.hi}, {"count", b.count},
                                                              {"normalized", b.normalized}});
  Json val2 = Json::object();
  for (const auto& [v, c] : pw.counts) val2[std::to_string(v)] = c;
  run.summary = {{"unique_twins", ts.size()},
                 {"trials", ts.trials},
                 {"failed_trials", ts.failed_trials},
                 {"effective_grid", cfg.effective_grid()},
                 {"max_val2", pw.max_val2},
                 {"val2_counts", val2},
                 {"pow2_all_divisible", pw.all_divisible},
                 {"histogram", hist}};
  if (!ts.empty()) run.summary["largest"] = ts.values().front().get_str();
  run.log = ts.log;
  bool partial = ts.failed_trials > 0;
  for (const auto& l : ts.log)
    if (l.find(" partial") != std::string::npos) partial = true;
  const int code = partial ? kPartial : kOk;
  if (!histogram_path.empty()) {
    std::string csv = "lo,hi,count,normalized\n";
    for (const auto& b : hist)
      csv += b["lo"].dump() + "," + b["hi"].dump() + "," + b["count"].dump() + "," + b["normalized"].dump() + "\n";
    atomic_write(histogram_path, csv);
  }
  emit(run, twins_to_string(ts), code);
  return code;
}

int cmd_verify(Run& run, const std::string& r_text, std::uint64_t B) {
  const BigInt r = parse_bigint(r_text);
  run.config = {{"r", r_text}, {"B", B}};
  if (r < 1) throw std::invalid_argument("r must be positive");
  const auto verdict = verify_twin(r, B);
  if (const auto* t = std::get_if<SmoothTwin>(&verdict)) {
    TwinRecord rec{*t, {}};
    rec.provenance.source = "verify";
    const Json j = twin_to_json(rec, B);
    run.summary = {{"smooth", true}, {"strict_bound", t->strict_bound}};
    emit(run, j.dump() + "\n", kOk);
    return kOk;
  }
  const auto& rej = std::get<TwinRejection>(verdict);
  const Json j{{"r", r_text}, {"B", B}, {"smooth", false}, {"cofactor", rej.cofactor.get_str()},
               {"member", rej.which == 0 ? "r" : "r+1"}};
  run.summary = j;
  emit(run, j.dump() + "\n", kDomain);
  return kDomain;
}

int cmd_brute(Run& run, std::uint64_t B, const std::string& bound) {
  run.config = {{"B", B}, {"bound", bound}};
  const TwinSet ts = brute_force_twins(B, parse_bigint(bound));
  run.summary = {{"count", ts.size()}};
  if (!ts.empty()) run.summary["largest"] = ts.values().front().get_str();
  emit(run, twins_to_string(ts), kOk);
  return kOk;
}

int cmd_pell(Run& run, const std::string& D, std::uint64_t B, int k_max, double x_max_log2, int index) {
  if (!D.empty()) {
    run.config = {{"D", D}, {"index", index}};
    auto sol = pell_fundamental(parse_bigint(D));
    if (index > 1) sol = pell_solution(sol, index);
    const Json j{{"D", sol.D.get_str()}, {"x", sol.x.get_str()}, {"y", sol.y.get_str()}, {"index", sol.index}};
    run.summary = j;
    emit(run, j.dump() + "\n", kOk);
    return kOk;
  }
  if (B < 2) throw std::invalid_argument("pell needs --D or --B");
  StormerOptions opts;
  opts.k_max = k_max;
  if (x_max_log2 > 0) opts.x_max_log2 = x_max_log2;
  run.config = {{"B", B},
                {"k_max", k_max > 0 ? k_max : stormer_default_k_max(B)},
                {"x_max_log2", x_max_log2 > 0 ? x_max_log2 : stormer_default_x_max_log2(B)}};
  const TwinSet ts = stormer_enumerate(B, opts);
  run.summary = {{"count", ts.size()}, {"completeness", "heuristic"}};
  if (!ts.empty()) run.summary["largest"] = ts.values().front().get_str();
  emit(run, twins_to_string(ts), kOk);
  return kOk;
}

int cmd_chm(Run& run, std::uint64_t B, int max_rounds) {
  run.config = {{"B", B}, {"max_rounds", max_rounds}};
  const ChmResult res = chm_run(B, max_rounds);
  run.summary = {{"count", res.twins.size()}, {"rounds", res.rounds}, {"converged", res.converged},
                 {"sizes", res.sizes}};
  const int code = res.converged ? kOk : kPartial;
  emit(run, twins_to_string(res.twins), code);
  return code;
}

int cmd_ratio(Run& run, const std::string& twins_path, const std::string& r_text, std::uint64_t B,
              double alpha_log2, double e, double eta) {
  TwinSet ts;
  if (!r_text.empty()) {
    if (B < 2) throw std::invalid_argument("--r needs --B");
    TwinRecord rec{make_twin(parse_bigint(r_text), B), {}};
    ts.bound = B;
    ts.insert(rec);
  } else {
    ts = load_twins(twins_path);
    if (B >= 2) ts.bound = B;
  }
  const bool use_opt = std::isnan(alpha_log2);
  run.config = {{"twins", twins_path}, {"r", r_text}, {"B", ts.bound}, {"alpha", use_opt ? "alpha_opt" : "fixed"},
                {"e", e}, {"eta", eta}};
  if (!use_opt) run.config["alpha_log2"] = alpha_log2;
  const FactorBase fb = sieve_primes(ts.bound);
  std::vector<Json> rows;
  double sum = 0.0, mx = 0.0;
  for (const auto& rec : ts.records()) {
    if (rec.twin.r == 1) continue;
    LatticeInstance inst{fb, use_opt ? 0.0 : alpha_log2, {e, eta}, 128};
    const auto rep = gh_ratio(twin_rational(rec.twin), inst, use_opt);
    Json j{{"r", rec.twin.r.get_str()}, {"B", ts.bound}};
    j.update(report_to_json(rep));
    rows.push_back(std::move(j));
    sum += rep.ratio;
    mx = std::max(mx, rep.ratio);
  }
  run.summary = {{"count", rows.size()}, {"mean_ratio", rows.empty() ? 0.0 : sum / rows.size()},
                 {"max_ratio", mx}};
  emit(run, lines(rows), kOk);
  return kOk;
}

int cmd_sqisign(Run& run, const std::string& twins_path, const std::string& r_text, std::uint64_t B,
                std::uint64_t f_min) {
  run.config = {{"twins", twins_path}, {"r", r_text}, {"B", B}, {"f_min", f_min}};
  std::vector<Json> rows;
  if (!r_text.empty()) {
    rows.push_back(boost_to_json(boost_check(parse_bigint(r_text), B)));
  } else {
    for (const auto& rep : twin_and_boost_filter(load_twins(twins_path), B, f_min)) rows.push_back(boost_to_json(rep));
  }
  run.summary = {{"reports", rows.size()}};
  emit(run, lines(rows), kOk);
  return kOk;
}

int cmd_enumerate(Run& run, std::uint64_t B, int k_max, int kappa, std::uint64_t seed,
                  const std::string& reference, const CompletenessOptions& opts) {
  run.config = {{"B", B}, {"k_max", k_max}, {"kappa", kappa}, {"seed", seed}, {"reference", reference},
                {"radius_factor", opts.radius_factor}, {"node_budget", opts.node_budget},
                {"instance_budget", opts.instance_budget}};
  std::vector<BigInt> ref;
  if (!reference.empty()) ref = load_twins(reference).values();
  const auto rep = enumerate_toward_complete(B, k_max, kappa, seed, ref, opts);
  Json missing = Json::array();
  for (const auto& m : rep.missing) missing.push_back(m.get_str());
  run.summary = {{"found", rep.found.size()}, {"instances", rep.instances}, {"partial", rep.partial},
                 {"reference_size", rep.reference_size}, {"covered", rep.covered}, {"coverage", rep.coverage},
                 {"missing", missing}};
  run.log = rep.found.log;
  const int code = rep.partial ? kPartial : kOk;
  TwinSet out = rep.found;
  out.bound = B;
  emit(run, twins_to_string(out), code);
  if (run.output.empty()) std::cerr << run.summary.dump() << "\n";
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Smooth twin search with the prime number lattice"};
  app.require_subcommand(1);
  app.set_version_flag("--version", SMOOTHTWIN_VERSION);

  Run run;
  for (int i = 0; i < argc; ++i) run.argv.emplace_back(argv[i]);
  int workers_flag = 0;
  auto common = [&](CLI::App* sub) {
    sub->add_option("-o,--output", run.output, "Result file (stdout when omitted)");
    sub->add_option("--workers", workers_flag, "Worker threads (default SMOOTHTWIN_WORKERS or 1)")
        ->check(CLI::PositiveNumber);
  };

  std::uint64_t B = 0;
  int m = 2;
  auto* estimate = app.add_subcommand("estimate", "Heuristic bit size of the optimal twin");
  estimate->add_option("--B", B, "Smoothness bound")->required();
  estimate->add_option("--m", m, "Number of consecutive smooth integers");
  common(estimate);

  std::vector<double> us;
  auto* rho_cmd = app.add_subcommand("rho", "Dickman rho values");
  rho_cmd->add_option("--u", us, "Arguments")->required();
  common(rho_cmd);

  std::string config_path;
  SearchConfig cfg;
  std::string mode = "enumeration";
  std::string histogram_path;
  auto* search = app.add_subcommand("search", "Lattice search for smooth twins");
  search->add_option("--config", config_path, "SearchConfig JSON file");
  search->add_option("--B", cfg.B, "Smoothness bound");
  search->add_option("--alpha-log2", cfg.alpha_log2_grid, "log2 of the scalar weight (repeatable)");
  search->add_option("--e", cfg.e, "Diagonal weight exponent");
  search->add_option("--eta", cfg.eta, "Extra down-weighting of the power of two slot");
  search->add_option("--pow2-f", cfg.pow2_f, "Use 2^f in place of 2");
  search->add_option("--guess-k", cfg.guess_k, "Primes guessed away per trial");
  search->add_option("--lift-l", cfg.lift_l, "Dimensions lifted");
  search->add_option("--protected", cfg.protected_prefix_bound, "Primes up to this bound are never guessed");
  search->add_option("--trials", cfg.trials, "Number of trials");
  search->add_option("--seed", cfg.seed, "Seed");
  search->add_option("--radius-factor", cfg.radius_factor, "Harvest radius in units of gh");
  search->add_option("--mode", mode, "enumeration or sieve")->check(CLI::IsMember({"enumeration", "sieve"}));
  search->add_option("--bkz-block", cfg.bkz_block, "BKZ block size");
  search->add_option("--bkz-tours", cfg.bkz_tours, "BKZ tours");
  search->add_option("--node-budget", cfg.node_budget, "Enumeration node budget per instance");
  search->add_option("--histogram", histogram_path, "Write the bit size histogram as CSV");
  common(search);

  std::string r_text;
  auto* verify = app.add_subcommand("verify", "Check that r(r+1) is B-smooth");
  verify->add_option("--r", r_text, "r")->required();
  verify->add_option("--B", B, "Smoothness bound")->required();
  common(verify);

  std::string bound = "1000000";
  auto* brute = app.add_subcommand("brute", "All twins below a bound from smooth number generation");
  brute->add_option("--B", B, "Smoothness bound")->required();
  brute->add_option("--bound", bound, "Upper bound for r+1");
  common(brute);

  std::string D;
  int k_max = 0, index = 1;
  double x_max_log2 = 0.0;
  auto* pell = app.add_subcommand("pell", "Pell equation solutions or the Stormer enumeration");
  pell->add_option("--D", D, "Solve x^2 - D y^2 = 1");
  pell->add_option("--index", index, "Solution index for --D")->check(CLI::PositiveNumber);
  pell->add_option("--B", B, "Enumerate twins over all squarefree D on primes up to B");
  pell->add_option("--k-max", k_max, "Solutions per equation (0 picks max(3,(q+1)/2))");
  pell->add_option("--x-max-log2", x_max_log2, "Early abort bound on log2 x");
  common(pell);

  int max_rounds = 1000;
  auto* chm = app.add_subcommand("chm", "CHM recursion to a fixed point");
  chm->add_option("--B", B, "Smoothness bound")->required();
  chm->add_option("--max-rounds", max_rounds, "Round limit");
  common(chm);

  std::string twins_path;
  double alpha_log2 = std::numeric_limits<double>::quiet_NaN();
  double e = 1.0, eta = 1.0;
  auto* ratio = app.add_subcommand("ratio-report", "GH ratio analysis of twins");
  auto* ratio_src = ratio->add_option("--twins", twins_path, "Twin JSON-lines file ('-' for stdin)");
  ratio->add_option("--r", r_text, "Single twin")->excludes(ratio_src);
  ratio->add_option("--B", B, "Factor base bound (defaults to the file's B)");
  ratio->add_option("--alpha-log2", alpha_log2, "Fixed scalar (default: alpha_opt per twin)");
  ratio->add_option("--e", e, "Diagonal weight exponent");
  ratio->add_option("--eta", eta, "Power of two down-weighting");
  common(ratio);

  std::uint64_t boost_B = 2048, f_min = 0;
  auto* sq = app.add_subcommand("sqisign-check", "Twin-and-boost check of p = 2 r^2 - 1");
  auto* sq_src = sq->add_option("--twins", twins_path, "Twin JSON-lines file ('-' for stdin)");
  sq->add_option("--r", r_text, "Single candidate r")->excludes(sq_src);
  sq->add_option("--B", boost_B, "Smoothness bound for T");
  sq->add_option("--f-min", f_min, "Minimal f = val2(p+1) kept from a twin file");
  common(sq);

  int kappa = 4;
  std::uint64_t seed = 0;
  std::string reference;
  CompletenessOptions copts;
  auto* enumerate = app.add_subcommand("enumerate", "All guess subsets up to k_max with kappa scalars each");
  enumerate->add_option("--B", B, "Smoothness bound")->required();
  enumerate->add_option("--k-max", k_max, "Largest guessed subset");
  enumerate->add_option("--kappa", kappa, "Scalars per subset")->check(CLI::PositiveNumber);
  enumerate->add_option("--seed", seed, "Seed for the scalar offsets");
  enumerate->add_option("--reference", reference, "Reference twin file for coverage");
  enumerate->add_option("--radius-factor", copts.radius_factor, "Enumeration radius in units of gh");
  enumerate->add_option("--node-budget", copts.node_budget, "Node budget per instance");
  enumerate->add_option("--instance-budget", copts.instance_budget, "Total instance budget");
  common(enumerate);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& ex) {
    return app.exit(ex);
  } catch (const CLI::ParseError& ex) {
    app.exit(ex);
    return kUsage;
  }

  CLI::App* sub = app.get_subcommands().front();
  run.subcommand = sub->get_name();
  try {
    run.workers = resolve_workers(workers_flag);
    if (sub == estimate) return cmd_estimate(run, B, m);
    if (sub == rho_cmd) return cmd_rho(run, us);
    if (sub == search) {
      if (!config_path.empty()) {
        std::ifstream in(config_path);
        if (!in) throw std::invalid_argument("cannot open config " + config_path);
        SearchConfig from_file = config_from_json(Json::parse(in));
        // flags given explicitly on the command line override the file
        if (search->count("--seed")) from_file.seed = cfg.seed;
        if (search->count("--trials")) from_file.trials = cfg.trials;
        cfg = from_file;
      } else {
        if (cfg.B == 0) throw std::invalid_argument("search needs --config or --B");
        cfg.mode = mode == "sieve" ? HarvestMode::sieve : HarvestMode::enumeration;
      }
      return cmd_search(run, cfg, histogram_path);
    }
    if (sub == verify) return cmd_verify(run, r_text, B);
    if (sub == brute) return cmd_brute(run, B, bound);
    if (sub == pell) return cmd_pell(run, D, B, k_max, x_max_log2, index);
    if (sub == chm) return cmd_chm(run, B, max_rounds);
    if (sub == ratio) {
      if (twins_path.empty() && r_text.empty()) throw std::invalid_argument("ratio-report needs --twins or --r");
      return cmd_ratio(run, twins_path, r_text, B, alpha_log2, e, eta);
    }
    if (sub == sq) {
      if (twins_path.empty() && r_text.empty()) throw std::invalid_argument("sqisign-check needs --twins or --r");
      return cmd_sqisign(run, twins_path, r_text, boost_B, f_min);
    }
    if (sub == enumerate) return cmd_enumerate(run, B, k_max, kappa, seed, reference, copts);
  } catch (const BudgetExceeded& ex) {
    std::cerr << "smoothtwin: budget exceeded: " << ex.what() << "\n";
    return kPartial;
  } catch (const SearchFailed& ex) {
    std::cerr << "smoothtwin: " << ex.what() << "\n";
    return kDomain;
  } catch (const std::exception& ex) {
    std::cerr << "smoothtwin: " << ex.what() << "\n";
    return kDomain;
  }
  return kUsage;
}
