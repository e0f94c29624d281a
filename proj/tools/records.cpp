#include "records.hpp"

namespace qlab::tools {

Json rat_json(const Rat& v) {
  return Json{{"exact", rat_str(v)}, {"approx", to_double(v)}};
}

Json tree_json(const DeterministicTree& t) {
  Json nodes = Json::array();
  for (const auto& nd : t.nodes()) {
    Json j;
    j["query"] = nd.query;
    if (nd.query < 0) {
      if (nd.label)
        j["label"] = *nd.label;
      else
        j["label"] = nullptr;
    } else {
      j["on0"] = nd.left;
      j["on1"] = nd.right;
    }
    nodes.push_back(std::move(j));
  }
  return Json{{"nodes", std::move(nodes)}};
}

Json run_report_json(const RunReport& r) {
  Json j;
  j["record"] = "run";
  j["algorithm"] = r.algorithm;
  j["function"] = r.function;
  j["adversary-id"] = r.adversary_id;
  j["trials"] = r.trials;
  j["errors"] = r.errors;
  j["aborts"] = r.aborts;
  j["error-rate"] = r.error_rate;
  j["ci-low"] = r.ci_low;
  j["ci-high"] = r.ci_high;
  j["max-queries"] = r.max_raw_queries;
  j["mean-queries"] = r.mean_raw_queries;
  j["seed"] = r.seed;
  j["confidence"] = r.confidence;
  return j;
}

Json check_json(const std::string& id, const Json& params, bool pass, const Json& witness) {
  Json j;
  j["record"] = "check";
  j["check-id"] = id;
  j["instance-params"] = params;
  j["pass"] = pass;
  j["extremal-witness"] = witness;
  return j;
}

}  // namespace qlab::tools
