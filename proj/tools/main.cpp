#include <fstream>
#include <iostream>
#include <memory>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "battery.hpp"
#include "records.hpp"
#include "qlab/algorithms.hpp"
#include "qlab/boolfn.hpp"
#include "qlab/certificates.hpp"
#include "qlab/distributions.hpp"
#include "qlab/dtree.hpp"
#include "qlab/rng.hpp"
#include "qlab/solvers.hpp"

namespace {

using namespace qlab;
using tools::Json;
using tools::RecordSink;

std::uint64_t sub_seed(std::uint64_t base, std::uint64_t salt) {
  std::uint64_t z = base + 0x9e3779b97f4a7c15ull * (salt + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// Noise specs: "zeros", "all:<rate>", "random:<seed>", "list:r1,r2,...".
std::vector<Rat> parse_noise(const std::string& spec, int count, bool one_sided) {
  if (spec == "zeros" || spec.empty()) return std::vector<Rat>(static_cast<size_t>(count), Rat(0));
  auto colon = spec.find(':');
  std::string head = spec.substr(0, colon);
  std::string tail = colon == std::string::npos ? "" : spec.substr(colon + 1);
  if (head == "all") {
    return std::vector<Rat>(static_cast<size_t>(count), parse_rat(tail));
  }
  if (head == "random") {
    Rng g(std::stoull(tail));
    // k/192 <= 1/3 for the two-sided cap, k/128 <= 1/2 for the one-sided one.
    long num_cap = one_sided ? 64 : 64;
    long den = one_sided ? 128 : 192;
    std::vector<Rat> nu(static_cast<size_t>(count));
    for (auto& v : nu)
      v = make_rat(static_cast<long>(g.uniform_below(static_cast<std::uint64_t>(num_cap + 1))),
                   den);
    return nu;
  }
  if (head == "list") {
    std::vector<Rat> nu;
    size_t at = 0;
    while (at <= tail.size()) {
      size_t comma = tail.find(',', at);
      if (comma == std::string::npos) comma = tail.size();
      nu.push_back(parse_rat(tail.substr(at, comma - at)));
      at = comma + 1;
    }
    if (static_cast<int>(nu.size()) != count)
      throw std::invalid_argument("noise list holds " + std::to_string(nu.size()) +
                                  " rates, need " + std::to_string(count));
    return nu;
  }
  throw std::invalid_argument("unknown noise spec: " + spec);
}

struct SinkHolder {
  std::ofstream file;
  std::unique_ptr<RecordSink> sink;

  explicit SinkHolder(const std::string& out_path) {
    if (out_path.empty()) {
      sink = std::make_unique<RecordSink>(&std::cout);
    } else {
      file.open(out_path);
      if (!file) throw std::invalid_argument("cannot open output file: " + out_path);
      sink = std::make_unique<RecordSink>(&file);
    }
  }
};

void summarize(const RunReport& r) {
  std::cerr << r.algorithm << " on " << r.function << " vs " << r.adversary_id << ": error "
            << r.error_rate << " (CI " << r.ci_low << ".." << r.ci_high << "), max queries "
            << r.max_raw_queries << ", aborts " << r.aborts << "\n";
}

int run_simulate(const std::string& alg, const std::string& fn_text, int n, int m,
                 std::uint64_t trials, std::uint64_t seed, const std::string& noise_spec,
                 RecordSink& sink) {
  std::vector<std::pair<std::string, Bits>> inputs;
  PartialFunction f;
  QueryProcedure proc;
  bool one_sided = false;

  if (alg == "noisy-or") {
    if (n <= 0) throw std::invalid_argument("noisy-or needs --n");
    f = catalog("or", n);
    proc = noisy_or_procedure(n);
    inputs.emplace_back("zeros", Bits(static_cast<size_t>(n), 0));
    Bits one_hot(static_cast<size_t>(n), 0);
    one_hot[0] = 1;
    inputs.emplace_back("one-hot", one_hot);
  } else if (alg == "which-gapor") {
    if (m <= 0 || m % 2 != 0) throw std::invalid_argument("which-gapor needs even --m");
    f = compose(catalog("which", 2), catalog("gapor", m)).as_partial();
    proc = which_gapor_procedure(m);
    Bits left(2 * static_cast<size_t>(m), 0), right(2 * static_cast<size_t>(m), 0);
    for (int j = 0; j < m / 2; ++j) {
      left[static_cast<size_t>(j)] = 1;
      right[static_cast<size_t>(m + j)] = 1;
    }
    inputs.emplace_back("left-heavy", left);
    inputs.emplace_back("right-heavy", right);
  } else if (alg == "zero-sided-which") {
    if (fn_text.empty()) throw std::invalid_argument("zero-sided-which needs --fn");
    PartialFunction fprime = parse_function(fn_text);
    f = compose(fprime, catalog("which", 2)).as_partial();
    proc = zero_sided_which_procedure(fprime);
    one_sided = true;
    size_t blocks = static_cast<size_t>(fprime.arity());
    Bits all_left(2 * blocks, 0), alternating(2 * blocks, 0);
    for (size_t blk = 0; blk < blocks; ++blk) {
      all_left[2 * blk] = 1;
      alternating[2 * blk + blk % 2] = 1;
    }
    inputs.emplace_back("all-left", all_left);
    inputs.emplace_back("alternating", alternating);
  } else if (alg == "one-query") {
    if (fn_text.empty()) throw std::invalid_argument("one-query needs --fn");
    f = parse_function(fn_text);
    proc = one_query_procedure(f.arity());
    inputs.emplace_back("first-promise", promise_inputs(f).at(0));
  } else {
    throw std::invalid_argument("unknown algorithm: " + alg);
  }

  std::vector<Rat> nu = parse_noise(noise_spec, f.arity(), one_sided);
  NoiseModel noise = one_sided ? NoiseModel::one_sided(nu) : NoiseModel::two_sided(nu);
  int k = 0;
  for (const auto& [iname, input] : inputs) {
    Adversary adv{(noise_spec.empty() ? "zeros" : noise_spec) + "/" + iname, input, noise};
    auto rep = estimate_error(alg, proc, f, adv, trials, sub_seed(seed, 40 + k++), 0.99, 1);
    sink.emit(tools::run_report_json(rep));
    summarize(rep);
  }
  return 0;
}

int run_verify(const std::string& fact, int n, int m, int max_width, const Rat& eps,
               std::uint64_t trials, std::uint64_t seed, RecordSink& sink) {
  bool pass = true;
  Json witness;

  if (fact == "2.2") {
    auto rep = verify_gapmaj_ratio(m, max_width);
    pass = rep.pass;
    witness = Json{{"checked", rep.checked},
                   {"worst-ratio", tools::rat_json(rep.worst_ratio)},
                   {"worst-conj", rep.worst_conj.to_string()},
                   {"worst-z", rep.worst_z}};
    std::cerr << "slice ratio sweep m=" << m << ": " << rep.checked << " checked, extremal ratio "
              << rat_str(rep.worst_ratio) << " at " << rep.worst_conj.to_string() << "\n";
  } else if (fact == "3.3") {
    auto rep = verify_gapor_facts(m, max_width);
    pass = rep.indicator_pass && rep.lower_bound_pass;
    witness = Json{{"indicator-checked", rep.indicator_checked},
                   {"lower-bound-checked", rep.lower_bound_checked},
                   {"worst-margin", tools::rat_json(rep.worst_margin)},
                   {"worst-conj", rep.worst_conj.to_string()}};
    std::cerr << "zero/half slice facts m=" << m << ": worst margin " << rat_str(rep.worst_margin)
              << "\n";
  } else if (fact == "xor-identity") {
    Rng g(seed);
    Rat worst = 0;
    for (std::uint64_t i = 0; i < trials && pass; ++i) {
      Conjunction c = random_conjunction(g, n * m, max_width);
      auto rep = xor_fourier_check(n, m, c);
      if (!(rep.product_bound_ok && rep.band_ok)) pass = false;
      Rat mag = rep.dec.prod_a < 0 ? Rat(-rep.dec.prod_a) : rep.dec.prod_a;
      if (mag > worst) worst = mag;
    }
    witness = Json{{"sweeps", trials}, {"largest-character-coefficient", tools::rat_json(worst)}};
    std::cerr << "parity identities n=" << n << " m=" << m << ": " << trials
              << " random conjunctions, largest coefficient " << rat_str(worst) << "\n";
  } else if (fact == "maj-trichotomy") {
    Rng g(seed);
    for (std::uint64_t i = 0; i < trials && pass; ++i) {
      Conjunction c = random_conjunction(g, n * m, max_width);
      auto rep = maj_case_analysis(n, m, c);
      if (rep.q_ratio_in_regime && !(rep.q_ratio_ok && rep.branch != MajBranch::None)) pass = false;
    }
    witness = Json{{"sweeps", trials}};
    std::cerr << "three-slice trichotomy n=" << n << " m=" << m << ": " << trials
              << " random conjunctions\n";
  } else if (fact == "3.4") {
    Rng g(seed);
    long rejections = 0;
    for (std::uint64_t i = 0; i < trials && pass; ++i) {
      std::vector<char> in_B(static_cast<size_t>(n), 0);
      std::vector<Rat> c(static_cast<size_t>(n));
      for (;;) {
        int nb = static_cast<int>(g.uniform_below(static_cast<std::uint64_t>(n / 2)));
        std::fill(in_B.begin(), in_B.end(), 0);
        for (int t = 0; t < nb;) {
          int j = static_cast<int>(g.uniform_below(static_cast<std::uint64_t>(n)));
          if (!in_B[static_cast<size_t>(j)]) {
            in_B[static_cast<size_t>(j)] = 1;
            ++t;
          }
        }
        for (auto& v : c) {
          long den = 1 + static_cast<long>(g.uniform_below(12));
          v = make_rat(static_cast<long>(g.uniform_below(static_cast<std::uint64_t>(den + 1))),
                       den);
        }
        if (maj_subset_mean_hypothesis(n, in_B, c)) break;
        ++rejections;
      }
      auto rep = maj_case_from_values(n, in_B, c);
      if (!(rep.q_ratio_ok && rep.err_term_dominated)) pass = false;
    }
    witness = Json{{"instances", trials}, {"hypothesis-rejections", rejections}};
    std::cerr << "three-slice value identities n=" << n << ": " << trials << " instances\n";
  } else if (fact == "3.5") {
    Rng g(seed);
    for (std::uint64_t i = 0; i < trials && pass; ++i) {
      int len = 1 + static_cast<int>(g.uniform_below(8));
      std::vector<Rat> alphas(static_cast<size_t>(len)), betas(static_cast<size_t>(len));
      for (;;) {
        bool positive = false;
        for (int j = 0; j < len; ++j) {
          alphas[static_cast<size_t>(j)] = make_rat(static_cast<long>(g.uniform_below(7)),
                                                    1 + static_cast<long>(g.uniform_below(6)));
          betas[static_cast<size_t>(j)] = make_rat(static_cast<long>(g.uniform_below(7)),
                                                   1 + static_cast<long>(g.uniform_below(6)));
          if (alphas[static_cast<size_t>(j)] * betas[static_cast<size_t>(j)] > 0) positive = true;
        }
        if (positive) break;
      }
      if (!verify_sym_inequality(alphas, betas)) pass = false;
    }
    witness = Json{{"vectors", trials}};
    std::cerr << "weighted Cauchy-Schwarz: " << trials << " vectors\n";
  } else if (fact == "2.1") {
    DeterministicTree probe =
        DeterministicTree::internal(0, DeterministicTree::leaf(0), DeterministicTree::leaf(1));
    RandomizedTree rt({{probe, Rat(1)}});
    FiniteDist d0 = FiniteDist::from_slice(SliceDistribution(3, 1));
    FiniteDist d1 = FiniteDist::from_slice(SliceDistribution(3, 2));
    auto cert = extract_postselection_certificate(rt, d0, d1, make_rat(1, 3));
    pass = make_rat(1, 3) * cert.mass_z == make_rat(2, 9) &&
           make_rat(2, 3) * cert.mass_other == make_rat(2, 9);
    witness = Json{{"conj", cert.conj.to_string()},
                   {"z", cert.z},
                   {"mass-z", tools::rat_json(cert.mass_z)},
                   {"mass-other", tools::rat_json(cert.mass_other)}};
    std::cerr << "postselection boundary example: certificate at " << cert.conj.to_string()
              << "\n";
  } else if (fact == "3.1" || fact == "3.2") {
    // Random-instance sweeps live in the acceptance battery; here the single
    // worked example is replayed.
    if (fact == "3.2") {
      OutcomeTable table;
      table.rows.push_back({Rat(1), {eps, 1 - eps, Rat(1)}});
      size_t pick = select_outcome(table, eps);
      pass = pick == 0;
      witness = Json{{"picked", pick}};
      std::cerr << "outcome selection on the one-row table: picked " << pick << "\n";
    } else {
      PartialFunction f = catalog("gapor", 2);
      JuntaSolution junta;
      conical_junta_degree(f, eps, &junta);
      Rat lam = 0;
      for (const auto& [c, w] : junta.weights) lam += w;
      Rat norm = lam > 1 ? lam : Rat(1);
      std::vector<std::pair<DeterministicTree, Rat>> support;
      for (const auto& [c, w] : junta.weights) {
        DeterministicTree t = DeterministicTree::leaf(1);
        std::vector<std::pair<int, bool>> lits;
        for (int idx : c.pos) lits.emplace_back(idx, true);
        for (int idx : c.neg) lits.emplace_back(idx, false);
        std::sort(lits.begin(), lits.end());
        for (auto it = lits.rbegin(); it != lits.rend(); ++it) {
          DeterministicTree reject = DeterministicTree::leaf(0);
          t = it->second ? DeterministicTree::internal(it->first, reject, t)
                         : DeterministicTree::internal(it->first, t, reject);
        }
        support.emplace_back(t, w / norm);
      }
      if (lam < norm) support.emplace_back(DeterministicTree::leaf(0), 1 - lam / norm);
      RandomizedTree rt(std::move(support));
      FiniteDist d0 = FiniteDist::from_slice(SliceDistribution(2, 0));
      FiniteDist d1 = FiniteDist::from_slice(SliceDistribution(2, 1));
      FiniteDist d2 = FiniteDist::mix(make_rat(1, 2), d0, make_rat(1, 2), d1);
      auto cert = extract_wapp_certificate(rt, 1 / norm, d0, d1, d2, eps);
      pass = cert.mass1 > 0;
      witness = Json{{"conj", cert.conj.to_string()},
                     {"mass0", tools::rat_json(cert.mass0)},
                     {"mass1", tools::rat_json(cert.mass1)},
                     {"mass2", tools::rat_json(cert.mass2)}};
      std::cerr << "acceptance-band extraction: certificate at " << cert.conj.to_string() << "\n";
    }
  } else {
    throw std::invalid_argument("unknown fact id: " + fact);
  }

  sink.emit(tools::check_json("verify-" + fact,
                              Json{{"n", n}, {"m", m}, {"max-width", max_width}},
                              pass, witness));
  std::cerr << (pass ? "verified\n" : "VIOLATION found\n");
  return pass ? 0 : 1;
}

int run_solve(const std::string& fn_text, std::optional<int> depth, std::optional<Rat> eps,
              RecordSink& sink) {
  if (!depth && !eps)
    throw std::invalid_argument("solve needs --depth (game value) or --epsilon (junta degree)");
  PartialFunction f = parse_function(fn_text);
  if (depth) {
    auto res = solve_query_game(f, *depth);
    Json dist = Json::array();
    for (const auto& [x, w] : res.hard_distribution)
      dist.push_back(Json{{"input", format_bits(x)}, {"weight", tools::rat_json(w)}});
    sink.emit(Json{{"record", "game-value"},
                   {"function", f.name()},
                   {"depth", *depth},
                   {"value", tools::rat_json(res.value)},
                   {"iterations", res.iterations},
                   {"support-size", res.strategy.size()},
                   {"hard-distribution", dist}});
    std::cerr << "game value of " << f.name() << " at depth " << *depth << ": "
              << rat_str(res.value) << "\n";
  }
  if (eps) {
    JuntaSolution junta;
    int degree = conical_junta_degree(f, *eps, &junta);
    Json weights = Json::array();
    for (const auto& [c, w] : junta.weights)
      weights.push_back(Json{{"conj", c.to_string()}, {"weight", tools::rat_json(w)}});
    sink.emit(Json{{"record", "junta-degree"},
                   {"function", f.name()},
                   {"epsilon", rat_str(*eps)},
                   {"degree", degree},
                   {"weights", weights}});
    std::cerr << "conical junta degree of " << f.name() << " at eps " << rat_str(*eps) << ": "
              << degree << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  // `--suite X` is sugar for the subcommand form.
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  for (size_t i = 0; i + 1 < args.size(); ++i) {
    if (args[i] == "--suite") {
      std::string suite = args[i + 1];
      args.erase(args.begin() + static_cast<long>(i), args.begin() + static_cast<long>(i) + 2);
      args.insert(args.begin(), suite);
      break;
    }
  }

  CLI::App app{"decision-tree laboratory for composed functions under noisy queries"};
  app.require_subcommand(1);

  std::string alg = "noisy-or", fn_text, noise_spec = "zeros", out_path, fact = "2.2";
  int n = 0, m = 0, max_width = 3, depth_val = 0;
  std::uint64_t trials = 100000, seed = 7;
  std::string eps_text;
  bool inject_fault = false;

  auto* sim = app.add_subcommand("simulate", "run a randomized algorithm against an adversary");
  sim->add_option("--alg", alg, "noisy-or | which-gapor | zero-sided-which | one-query");
  sim->add_option("--fn", fn_text, "function spec, e.g. xor[20] or 'or[4] o gapor[6]'");
  sim->add_option("--n", n, "outer size");
  sim->add_option("--m", m, "inner size");
  sim->add_option("--trials", trials, "Monte Carlo trials");
  sim->add_option("--seed", seed, "root seed");
  sim->add_option("--noise", noise_spec, "zeros | all:R | random:S | list:r1,r2,...");
  sim->add_option("--out", out_path, "record file (default: standard output)");

  auto* ver = app.add_subcommand("verify-certificates", "exact sweeps of the inequality catalog");
  ver->add_option("--fact", fact,
                  "2.1 | 2.2 | 3.1 | 3.2 | 3.3 | 3.4 | 3.5 | xor-identity | maj-trichotomy");
  ver->add_option("--n", n, "outer size");
  ver->add_option("--m", m, "inner size");
  ver->add_option("--max-width", max_width, "conjunction width cap");
  ver->add_option("--epsilon", eps_text, "error parameter as a rational, e.g. 1/16");
  ver->add_option("--trials", trials, "random instances for sweep facts");
  ver->add_option("--seed", seed, "root seed");
  ver->add_option("--out", out_path, "record file (default: standard output)");

  auto* sol = app.add_subcommand("solve", "exact game values and junta degrees");
  sol->add_option("--fn", fn_text, "function spec")->required();
  sol->add_option("--depth", depth_val, "tree depth for the game value");
  sol->add_option("--epsilon", eps_text, "junta error parameter as a rational");
  sol->add_option("--out", out_path, "record file (default: standard output)");

  auto* rep = app.add_subcommand("reproduce-all", "run the full acceptance battery");
  rep->add_option("--seed", seed, "root seed (default 7)");
  rep->add_option("--out", out_path, "record file (default: standard output)");
  rep->add_flag("--inject-fault", inject_fault, "perturb one frozen constant (harness self-test)")
      ->group("");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    SinkHolder holder(out_path);
    if (sim->parsed())
      return run_simulate(alg, fn_text, n, m, trials, seed, noise_spec, *holder.sink);
    if (ver->parsed()) {
      if (trials == 100000 && (fact == "3.4" || fact == "3.5" || fact == "2.1")) trials = 1000;
      Rat eps = eps_text.empty() ? make_rat(1, 16) : parse_rat(eps_text);
      return run_verify(fact, n, m, max_width, eps, trials, seed, *holder.sink);
    }
    if (sol->parsed()) {
      std::optional<int> depth_opt;
      if (sol->count("--depth") > 0) depth_opt = depth_val;
      std::optional<Rat> eps_opt;
      if (!eps_text.empty()) eps_opt = parse_rat(eps_text);
      return run_solve(fn_text, depth_opt, eps_opt, *holder.sink);
    }
    tools::BatteryConfig cfg{seed, inject_fault};
    return tools::reproduce_all(cfg, *holder.sink, std::cerr);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
