// Acceptance gate: drives the command-line battery twice, re-derives every
// criterion from the emitted record stream, and prints one verdict line per
// criterion. All tolerances are pinned here, independent of the battery.
#include <cstdio>
#include <cmath>
#include <cstdlib>
#include <iostream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

using Json = nlohmann::json;

namespace {

std::string run_battery(const std::string& cli) {
  std::string cmd = "'" + cli + "' reproduce-all --seed 7 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) throw std::runtime_error("failed to start " + cmd);
  std::string out;
  char buf[4096];
  size_t got;
  while ((got = fread(buf, 1, sizeof(buf), pipe)) > 0) out.append(buf, got);
  int rc = pclose(pipe);
  if (rc == -1) throw std::runtime_error("failed to reap " + cmd);
  return out;
}

struct Records {
  std::vector<Json> runs;
  std::map<std::string, Json> checks;
  Json summary;
};

Records parse_records(const std::string& stream) {
  Records rec;
  size_t start = 0;
  while (start < stream.size()) {
    size_t end = stream.find('\n', start);
    if (end == std::string::npos) end = stream.size();
    std::string line = stream.substr(start, end - start);
    start = end + 1;
    if (line.empty()) continue;
    Json j = Json::parse(line);
    std::string kind = j.at("record").get<std::string>();
    if (kind == "run")
      rec.runs.push_back(std::move(j));
    else if (kind == "check")
      rec.checks.emplace(j.at("check-id").get<std::string>(), std::move(j));
    else if (kind == "summary")
      rec.summary = std::move(j);
  }
  return rec;
}

const Json& witness_of(const Records& rec, const std::string& id) {
  return rec.checks.at(id).at("extremal-witness");
}

bool check_passed(const Records& rec, const std::string& id) {
  auto it = rec.checks.find(id);
  return it != rec.checks.end() && it->second.at("pass").get<bool>();
}

// Witness arrays tag their entries with a stage or route name.
std::vector<Json> stage_entries(const Json& witness, const std::string& key,
                                const std::string& value) {
  std::vector<Json> out;
  for (const auto& entry : witness)
    if (entry.contains(key) && entry.at(key).get<std::string>() == value) out.push_back(entry);
  return out;
}

int failures = 0;

void verdict(int number, bool ok, const std::string& description) {
  if (!ok) ++failures;
  std::cout << "criterion " << number << ": " << (ok ? "PASS" : "FAIL") << " - " << description
            << "\n";
}

bool approx_is(const Json& rat, const char* exact) {
  return rat.at("exact").get<std::string>() == exact;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: acceptance <path-to-cli>\n";
    return 2;
  }
  std::string first, second;
  try {
    first = run_battery(argv[1]);
    second = run_battery(argv[1]);
  } catch (const std::exception& e) {
    std::cerr << "failed to run the battery: " << e.what() << "\n";
    return 2;
  }

  Records rec;
  try {
    rec = parse_records(first);
  } catch (const std::exception& e) {
    std::cerr << "failed to parse the record stream: " << e.what() << "\n";
    return 2;
  }

  // 1: the noisy disjunction holds error at most 1/3 against every adversary
  // at both sizes, with hard query caps, at full trial counts.
  try {
    std::map<int, int> runs_per_n;
    bool ok = check_passed(rec, "noisy-or-error");
    for (const Json& run : rec.runs) {
      if (run.at("algorithm").get<std::string>() != "noisy-or") continue;
      std::string fn = run.at("function").get<std::string>();
      size_t lb = fn.find('['), ub = fn.find(']');
      int n = std::stoi(fn.substr(lb + 1, ub - lb - 1));
      ++runs_per_n[n];
      if (run.at("trials").get<long long>() < 100000) ok = false;
      if (run.at("ci-high").get<double>() > 1.0 / 3.0) ok = false;
      if (run.at("max-queries").get<long long>() > 30ll * n) ok = false;
      if (run.at("aborts").get<long long>() != 0) ok = false;
    }
    // 7 flip schedules x 2 inputs at each size
    ok = ok && runs_per_n[50] >= 14 && runs_per_n[200] >= 14;
    verdict(1, ok, "noisy disjunction: 99% upper confidence below 1/3, raw queries within 30n");
  } catch (const std::exception&) {
    verdict(1, false, "noisy disjunction: record stream incomplete");
  }

  // 2: walk formulas against two independent numeric routes; exact 5-vote rates.
  try {
    bool ok = check_passed(rec, "walk-hitting");
    const Json& w = witness_of(rec, "walk-hitting");
    auto mc = stage_entries(w, "route", "monte-carlo");
    ok = ok && mc.size() == 3;
    for (const Json& e : mc)
      ok = ok && std::abs(e.at("mean").get<double>() - e.at("expected").get<double>()) <=
                     3 * e.at("sigma").get<double>();
    auto dp = stage_entries(w, "route", "truncated-recursion");
    ok = ok && dp.size() == 3;
    for (const Json& e : dp)
      ok = ok && std::abs(e.at("value").get<double>() - e.at("target").get<double>()) < 1e-6;
    auto votes = stage_entries(w, "route", "vote5");
    ok = ok && votes.size() == 1 && votes[0].at("flip-at-1/3").get<std::string>() == "17/81" &&
         votes[0].at("flip-at-1/4").get<std::string>() == "53/512";
    verdict(2, ok, "hitting formulas match simulation and recursion; vote rates exact");
  } catch (const std::exception&) {
    verdict(2, false, "hitting formulas: record stream incomplete");
  }

  // 3: slice ratio bound over all four sizes plus formula-vs-counting audit.
  try {
    bool ok = check_passed(rec, "slice-ratio-bound");
    const Json& w = witness_of(rec, "slice-ratio-bound");
    std::set<int> sizes;
    long long compared = 0;
    for (const Json& e : w) {
      if (e.contains("m")) {
        sizes.insert(e.at("m").get<int>());
        ok = ok && e.at("pass").get<bool>();
      }
      if (e.contains("formula-vs-counting")) {
        ok = ok && e.at("formula-vs-counting").get<bool>();
        compared = e.at("compared").get<long long>();
      }
    }
    ok = ok && sizes == std::set<int>{6, 9, 12, 21} && compared > 0;
    verdict(3, ok, "slice masses bounded by 3^width across sizes; closed form audited");
  } catch (const std::exception&) {
    verdict(3, false, "slice ratio bound: record stream incomplete");
  }

  // 4: indicator and lower-bound slice facts across all four sizes.
  try {
    bool ok = check_passed(rec, "or-slice-facts");
    const Json& w = witness_of(rec, "or-slice-facts");
    std::set<int> sizes;
    for (const Json& e : w) {
      sizes.insert(e.at("m").get<int>());
      ok = ok && e.at("ok").get<bool>();
      ok = ok && e.at("worst-margin").at("approx").get<double>() >= 1.0 - 1e-12;
    }
    ok = ok && sizes == std::set<int>{4, 8, 16, 24};
    verdict(4, ok, "zero-slice indicators and half-slice lower bounds at all sizes");
  } catch (const std::exception&) {
    verdict(4, false, "slice facts: record stream incomplete");
  }

  // 5: parity-mixture identities, exhaustively small and at the 32x16 scale.
  try {
    bool ok = check_passed(rec, "parity-identity-sweep");
    const Json& w = witness_of(rec, "parity-identity-sweep");
    auto ex = stage_entries(w, "stage", "exhaustive");
    ok = ok && ex.size() == 1 && ex[0].at("ok").get<bool>() &&
         ex[0].at("checked").get<long long>() > 0;
    auto sweep = stage_entries(w, "stage", "regime-sweep");
    ok = ok && sweep.size() == 1 && sweep[0].at("ok").get<bool>() &&
         sweep[0].at("n").get<int>() == 32 && sweep[0].at("m").get<int>() == 16 &&
         sweep[0].at("width-cap").get<int>() == 11 &&
         sweep[0].at("sweeps").get<long long>() == 10000 &&
         sweep[0].at("largest-character-coefficient").at("approx").get<double>() <= 0.25 + 1e-12;
    verdict(5, ok, "parity-mixture product identity and band, small and at scale");
  } catch (const std::exception&) {
    verdict(5, false, "parity identities: record stream incomplete");
  }

  // 6: three-slice machinery: random values, inequality, factorization audit,
  // and the scaled trichotomy sweep.
  try {
    bool ok = check_passed(rec, "three-slice-machinery");
    const Json& w = witness_of(rec, "three-slice-machinery");
    auto rv = stage_entries(w, "stage", "random-values");
    std::set<int> sizes;
    for (const Json& e : rv) {
      sizes.insert(e.at("n").get<int>());
      ok = ok && e.at("ok").get<bool>() && e.at("instances").get<int>() == 200;
    }
    ok = ok && sizes == std::set<int>{4, 6, 8};
    auto cs = stage_entries(w, "stage", "weighted-cauchy-schwarz");
    ok = ok && cs.size() == 1 && cs[0].at("ok").get<bool>() &&
         cs[0].at("vectors").get<int>() == 1000;
    auto fact = stage_entries(w, "stage", "factorization-vs-brute-force");
    ok = ok && fact.size() == 1 && fact[0].at("ok").get<bool>() &&
         fact[0].at("compared").get<long long>() > 0;
    auto tri = stage_entries(w, "stage", "trichotomy-sweep");
    ok = ok && tri.size() == 1 && tri[0].at("ok").get<bool>() && tri[0].at("n").get<int>() == 32 &&
         tri[0].at("m").get<int>() == 32 && tri[0].at("sweeps").get<long long>() == 10000;
    verdict(6, ok, "three-slice factorization, resampling, ratio, and trichotomy");
  } catch (const std::exception&) {
    verdict(6, false, "three-slice machinery: record stream incomplete");
  }

  // 7: certificate extraction total on 500 instances per stage, with the
  // boundary example sitting exactly on 2/9 = 2/9.
  try {
    bool ok = check_passed(rec, "extraction-totality");
    const Json& w = witness_of(rec, "extraction-totality");
    for (const char* stage : {"postselection", "outcome-selection", "acceptance-band"}) {
      auto st = stage_entries(w, "stage", stage);
      ok = ok && st.size() == 1 && st[0].at("ok").get<bool>() &&
           st[0].at("successes").get<int>() == 500;
    }
    auto bd = stage_entries(w, "stage", "boundary-example");
    ok = ok && bd.size() == 1 && bd[0].at("ok").get<bool>() &&
         approx_is(bd[0].at("mass-z"), "2/3") && approx_is(bd[0].at("mass-other"), "1/3");
    verdict(7, ok, "extraction total over 500 instances per stage; boundary equality");
  } catch (const std::exception&) {
    verdict(7, false, "certificate extraction: record stream incomplete");
  }

  // 8: solver cross-checks: exact equality with full enumeration, pinned
  // distributional value, junta degree, and the dominating-conjunction pair.
  try {
    bool ok = check_passed(rec, "solver-cross-checks");
    const Json& w = witness_of(rec, "solver-cross-checks");
    auto game = stage_entries(w, "stage", "game-vs-enumeration");
    ok = ok && game.size() == 1 && game[0].at("ok").get<bool>() &&
         game[0].at("solved").get<long long>() >= 150;
    auto dist = stage_entries(w, "stage", "distributional");
    ok = ok && dist.size() == 1 && dist[0].at("ok").get<bool>() &&
         approx_is(dist[0].at("error"), "1/3");
    auto junta = stage_entries(w, "stage", "junta-degree");
    ok = ok && junta.size() == 1 && junta[0].at("ok").get<bool>();
    auto search = stage_entries(w, "stage", "conjunction-search");
    ok = ok && search.size() == 1 && search[0].at("ok").get<bool>() &&
         search[0].at("found-conj").get<std::string>() == "+1" &&
         search[0].at("strict-eps-found").get<bool>() == false;
    verdict(8, ok, "game solver equals enumeration; pinned solver values hold");
  } catch (const std::exception&) {
    verdict(8, false, "solver cross-checks: record stream incomplete");
  }

  // 9: locator mean within 3 sigma of 4 with zero errors; one-sided recovery
  // makes zero errors on every grid with aborts at most a tenth.
  try {
    bool ok = check_passed(rec, "which-recovery");
    const Json& w = witness_of(rec, "which-recovery");
    auto loc = stage_entries(w, "stage", "locator");
    ok = ok && loc.size() == 1 && loc[0].at("ok").get<bool>() &&
         loc[0].at("errors").get<long long>() == 0 &&
         loc[0].at("trials").get<long long>() == 100000 &&
         std::abs(loc[0].at("mean-queries").get<double>() - 4.0) <=
             3 * loc[0].at("sigma").get<double>();
    auto grids = stage_entries(w, "stage", "one-sided-recovery");
    ok = ok && grids.size() == 5;
    for (const Json& e : grids) {
      long long trials = e.at("trials").get<long long>();
      ok = ok && e.at("errors").get<long long>() == 0 &&
           10 * e.at("aborts").get<long long>() <= trials && trials == 100000;
    }
    verdict(9, ok, "locator cost and error; one-sided recovery exact on all grids");
  } catch (const std::exception&) {
    verdict(9, false, "recovery checks: record stream incomplete");
  }

  // 10: the whole record stream replays byte-identically.
  verdict(10, !first.empty() && first == second, "record stream is byte-identical across reruns");

  return failures == 0 ? 0 : 1;
}
