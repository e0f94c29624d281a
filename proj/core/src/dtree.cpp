#include "qlab/dtree.hpp"

#include <boost/math/distributions/binomial.hpp>

#include <algorithm>
#include <stdexcept>
#include <thread>

namespace qlab {

NoiseModel NoiseModel::none() { return {Kind::None, {}}; }

NoiseModel NoiseModel::two_sided(std::vector<Rat> nu) {
  NoiseModel m{Kind::TwoSided, std::move(nu)};
  for (const Rat& p : m.nu)
    if (p < 0 || p > make_rat(1, 3))
      throw std::invalid_argument("NoiseModel: two-sided rate outside [0, 1/3]");
  return m;
}

NoiseModel NoiseModel::one_sided(std::vector<Rat> nu) {
  NoiseModel m{Kind::OneSided, std::move(nu)};
  for (const Rat& p : m.nu)
    if (p < 0 || p > make_rat(1, 2))
      throw std::invalid_argument("NoiseModel: one-sided rate outside [0, 1/2]");
  return m;
}

void NoiseModel::validate(int arity) const {
  if (kind == Kind::None) {
    if (!nu.empty()) throw std::invalid_argument("NoiseModel: noiseless model carries rates");
    return;
  }
  if (static_cast<int>(nu.size()) != arity)
    throw std::invalid_argument("NoiseModel: rate tuple length != arity");
}

InputOracle::InputOracle(const Bits& input, const NoiseModel& noise, Rng& rng, bool record)
    : input_(input), kind_(noise.kind), rng_(rng), record_(record),
      per_coord_(input.size(), 0) {
  noise.validate(static_cast<int>(input.size()));
  if (kind_ != NoiseModel::Kind::None) {
    coins_.reserve(noise.nu.size());
    for (const Rat& p : noise.nu) {
      if (!p.get_num().fits_ulong_p() || !p.get_den().fits_ulong_p())
        throw std::invalid_argument("InputOracle: noise rate denominator too large");
      coins_.emplace_back(p.get_num().get_ui(), p.get_den().get_ui());
    }
  }
}

std::uint8_t InputOracle::query(int index) {
  if (index < 0 || index >= arity())
    throw std::invalid_argument("InputOracle::query: index out of range");
  ++raw_count_;
  ++per_coord_[index];
  std::uint8_t bit = input_[index];
  if (kind_ == NoiseModel::Kind::TwoSided) {
    const auto& [num, den] = coins_[index];
    if (num != 0 && rng_.bernoulli_raw(num, den)) bit ^= 1u;
  } else if (kind_ == NoiseModel::Kind::OneSided) {
    // True zeros are never misreported.
    if (bit == 1) {
      const auto& [num, den] = coins_[index];
      if (num != 0 && rng_.bernoulli_raw(num, den)) bit = 0;
    }
  }
  if (record_) transcript_.push_back({index, bit});
  return bit;
}

BlockOracle::BlockOracle(Oracle& base, int offset, int width)
    : base_(base), offset_(offset), width_(width) {
  if (offset < 0 || width <= 0 || offset + width > base.arity())
    throw std::invalid_argument("BlockOracle: block outside base range");
}

std::uint8_t BlockOracle::query(int index) {
  if (index < 0 || index >= width_)
    throw std::invalid_argument("BlockOracle::query: index out of range");
  return base_.query(offset_ + index);
}

QueryProcedure with_budget(QueryProcedure proc, std::uint64_t max_raw) {
  return [proc = std::move(proc), max_raw](Oracle& o) -> std::optional<std::uint64_t> {
    BudgetOracle gate(o, max_raw);
    try {
      return proc(gate);
    } catch (const BudgetExhausted&) {
      return std::nullopt;
    }
  };
}

DeterministicTree DeterministicTree::leaf(std::optional<std::uint64_t> label) {
  DeterministicTree t;
  t.nodes_.push_back({-1, -1, -1, label});
  return t;
}

int DeterministicTree::append(const DeterministicTree& sub) {
  const int base = static_cast<int>(nodes_.size());
  for (const Node& n : sub.nodes_) {
    Node copy = n;
    if (copy.left >= 0) copy.left += base;
    if (copy.right >= 0) copy.right += base;
    nodes_.push_back(copy);
  }
  return base;
}

DeterministicTree DeterministicTree::internal(int query, const DeterministicTree& on0,
                                              const DeterministicTree& on1) {
  if (query < 0) throw std::invalid_argument("DeterministicTree: negative query index");
  DeterministicTree t;
  t.nodes_.push_back({query, -1, -1, std::nullopt});
  t.nodes_[0].left = t.append(on0);
  t.nodes_[0].right = t.append(on1);
  return t;
}

namespace {

int depth_rec(const std::vector<DeterministicTree::Node>& nodes, int at) {
  const auto& n = nodes[at];
  if (n.query < 0) return 0;
  return 1 + std::max(depth_rec(nodes, n.left), depth_rec(nodes, n.right));
}

bool perfect_rec(const std::vector<DeterministicTree::Node>& nodes, int at, int r) {
  const auto& n = nodes[at];
  if (n.query < 0) return r == 0;
  return r > 0 && perfect_rec(nodes, n.left, r - 1) && perfect_rec(nodes, n.right, r - 1);
}

DeterministicTree pad_rec(const std::vector<DeterministicTree::Node>& nodes, int at, int r) {
  const auto& n = nodes[at];
  if (n.query < 0) {
    if (r == 0) return DeterministicTree::leaf(n.label);
    // Repeated throwaway queries on coordinate 0 stretch the leaf.
    DeterministicTree sub = pad_rec(nodes, at, r - 1);
    return DeterministicTree::internal(0, sub, sub);
  }
  if (r == 0) throw std::invalid_argument("pad_to_perfect: tree deeper than target");
  return DeterministicTree::internal(n.query, pad_rec(nodes, n.left, r - 1),
                                     pad_rec(nodes, n.right, r - 1));
}

}  // namespace

int DeterministicTree::depth() const {
  if (nodes_.empty()) throw std::logic_error("DeterministicTree: empty tree");
  return depth_rec(nodes_, 0);
}

bool DeterministicTree::is_perfect(int r) const {
  if (nodes_.empty()) throw std::logic_error("DeterministicTree: empty tree");
  return perfect_rec(nodes_, 0, r);
}

DeterministicTree DeterministicTree::pad_to_perfect(int r) const {
  if (nodes_.empty()) throw std::logic_error("DeterministicTree: empty tree");
  return pad_rec(nodes_, 0, r);
}

std::optional<std::uint64_t> DeterministicTree::evaluate(const Bits& x) const {
  int at = 0;
  for (;;) {
    const Node& n = nodes_[at];
    if (n.query < 0) return n.label;
    if (n.query >= static_cast<int>(x.size()))
      throw std::invalid_argument("DeterministicTree::evaluate: query out of range");
    at = x[n.query] ? n.right : n.left;
  }
}

std::optional<std::uint64_t> DeterministicTree::run(Oracle& o) const {
  int at = 0;
  for (;;) {
    const Node& n = nodes_[at];
    if (n.query < 0) return n.label;
    at = o.query(n.query) ? n.right : n.left;
  }
}

namespace {

void leaves_rec(const std::vector<DeterministicTree::Node>& nodes, int at,
                std::vector<std::pair<int, std::uint8_t>>& path,
                const std::function<void(const std::vector<std::pair<int, std::uint8_t>>&,
                                         const std::optional<std::uint64_t>&)>& fn) {
  const auto& n = nodes[at];
  if (n.query < 0) {
    fn(path, n.label);
    return;
  }
  path.emplace_back(n.query, 0);
  leaves_rec(nodes, n.left, path, fn);
  path.back().second = 1;
  leaves_rec(nodes, n.right, path, fn);
  path.pop_back();
}

}  // namespace

void DeterministicTree::for_each_leaf(
    const std::function<void(const std::vector<std::pair<int, std::uint8_t>>&,
                             const std::optional<std::uint64_t>&)>& fn) const {
  if (nodes_.empty()) throw std::logic_error("DeterministicTree: empty tree");
  std::vector<std::pair<int, std::uint8_t>> path;
  leaves_rec(nodes_, 0, path, fn);
}

RandomizedTree::RandomizedTree(std::vector<std::pair<DeterministicTree, Rat>> support_)
    : support(std::move(support_)) {
  Rat total;
  for (const auto& [t, w] : support) {
    if (w <= 0) throw std::invalid_argument("RandomizedTree: weights must be positive");
    total += w;
  }
  if (total != 1) throw std::invalid_argument("RandomizedTree: weights must sum to 1");
}

int RandomizedTree::depth() const {
  int d = 0;
  for (const auto& [t, w] : support) d = std::max(d, t.depth());
  return d;
}

std::pair<double, double> binomial_confidence(std::uint64_t k, std::uint64_t n,
                                              double confidence) {
  if (n == 0 || k > n) throw std::invalid_argument("binomial_confidence: bad counts");
  if (confidence <= 0 || confidence >= 1)
    throw std::invalid_argument("binomial_confidence: confidence outside (0,1)");
  using boost::math::binomial_distribution;
  const double alpha = (1.0 - confidence) / 2.0;
  const double lo = binomial_distribution<double>::find_lower_bound_on_p(
      static_cast<double>(n), static_cast<double>(k), alpha);
  const double hi = binomial_distribution<double>::find_upper_bound_on_p(
      static_cast<double>(n), static_cast<double>(k), alpha);
  return {lo, hi};
}

RunReport estimate_error(const std::string& algorithm, const QueryProcedure& proc,
                         const PartialFunction& f, const Adversary& adv, std::uint64_t trials,
                         std::uint64_t seed, double confidence, unsigned threads) {
  if (trials == 0) throw std::invalid_argument("estimate_error: zero trials");
  auto truth = f.evaluate(adv.input);
  if (!truth) throw std::invalid_argument("estimate_error: adversary input off the promise");
  adv.noise.validate(f.arity());

  struct Partial {
    std::uint64_t errors = 0, aborts = 0, max_raw = 0, total_raw = 0;
  };

  auto run_range = [&](std::uint64_t lo, std::uint64_t hi, Partial& acc) {
    for (std::uint64_t t = lo; t < hi; ++t) {
      Rng rng = Rng::for_trial(seed, t);
      InputOracle o(adv.input, adv.noise, rng);
      auto out = proc(o);
      if (!out) {
        ++acc.aborts;
        ++acc.errors;
      } else if (*out != *truth) {
        ++acc.errors;
      }
      acc.total_raw += o.raw_count();
      acc.max_raw = std::max(acc.max_raw, o.raw_count());
    }
  };

  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::uint64_t>(threads, trials));
  std::vector<Partial> partials(threads);
  if (threads == 1) {
    run_range(0, trials, partials[0]);
  } else {
    std::vector<std::thread> pool;
    const std::uint64_t chunk = (trials + threads - 1) / threads;
    for (unsigned i = 0; i < threads; ++i) {
      const std::uint64_t lo = i * chunk;
      const std::uint64_t hi = std::min(trials, lo + chunk);
      pool.emplace_back(run_range, lo, hi, std::ref(partials[i]));
    }
    for (auto& th : pool) th.join();
  }

  // Every statistic is a sum or max, so thread partitioning cannot change it.
  Partial total;
  for (const Partial& p : partials) {
    total.errors += p.errors;
    total.aborts += p.aborts;
    total.total_raw += p.total_raw;
    total.max_raw = std::max(total.max_raw, p.max_raw);
  }

  RunReport r;
  r.algorithm = algorithm;
  r.function = f.name();
  r.adversary_id = adv.id;
  r.trials = trials;
  r.errors = total.errors;
  r.aborts = total.aborts;
  r.error_rate = static_cast<double>(total.errors) / static_cast<double>(trials);
  std::tie(r.ci_low, r.ci_high) = binomial_confidence(total.errors, trials, confidence);
  r.max_raw_queries = total.max_raw;
  r.mean_raw_queries = static_cast<double>(total.total_raw) / static_cast<double>(trials);
  r.seed = seed;
  r.confidence = confidence;
  return r;
}

}  // namespace qlab
