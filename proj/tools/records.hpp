#pragma once

#include <ostream>
#include <string>

#include "json.hpp"
#include "qlab/dtree.hpp"
#include "qlab/rational.hpp"

namespace qlab::tools {

using Json = nlohmann::ordered_json;

// Line-delimited record stream; null sink swallows everything.
class RecordSink {
 public:
  explicit RecordSink(std::ostream* out) : out_(out) {}
  void emit(const Json& record) {
    if (out_) *out_ << record.dump() << '\n';
  }

 private:
  std::ostream* out_;
};

// Exact value next to a decimal rendering, so precision survives text.
Json rat_json(const Rat& v);
Json tree_json(const DeterministicTree& t);
Json run_report_json(const RunReport& r);
Json check_json(const std::string& id, const Json& params, bool pass, const Json& witness);

}  // namespace qlab::tools
