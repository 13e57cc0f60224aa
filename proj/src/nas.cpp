/*
 * Copyright 2026 The xbarc Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "xbarc/nas.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <limits>
#include <numeric>
#include <sstream>
#include <thread>

#include "xbarc/compile.hpp"
#include "xbarc/error.hpp"
#include "xbarc/simulator.hpp"

namespace xbarc {

using nlohmann::json;
using nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Search space

namespace {

Layer make_layer(std::string name, LayerKind kind, int k, int c_in, int c_out, int stride, int padding) {
  Layer l;
  l.name = std::move(name);
  l.kind = kind;
  l.k_h = l.k_w = k;
  l.c_in = c_in;
  l.c_out = c_out;
  l.stride = stride;
  l.padding = padding;
  return l;
}

void check_options(const std::vector<int>& opts, std::string_view what) {
  if (opts.empty()) throw ParseError(std::string(what) + ": option set is empty");
  for (int v : opts)
    if (v < 1) throw ParseError(std::string(what) + ": options must be >= 1");
}

int stem_channels(const SearchSpace& s) { return s.stem.empty() ? s.input_shape.channels : s.stem.back().c_out; }

std::vector<Layer> layers_from_json(const json& arr, std::string_view what) {
  if (!arr.is_array()) throw ParseError(std::string(what) + ": expected a list of layers");
  if (arr.empty()) return {};
  json doc;
  doc["input_shape"] = {1, 1, 1};
  doc["layers"] = arr;
  try {
    return network_from_json(doc).layers;
  } catch (const ParseError& e) {
    throw ParseError(std::string(what) + "." + e.what());
  }
}

}  // namespace

SearchSpace SearchSpace::mobilenet_v3_small() {
  SearchSpace s;
  s.input_shape = {3, 64, 64};
  s.stem = {
      make_layer("stem_conv", LayerKind::Conv, 3, 3, 16, 2, 1),
      make_layer("stem_dw", LayerKind::DwConv, 3, 16, 16, 2, 1),
      make_layer("stem_project", LayerKind::Conv, 1, 16, 16, 1, 0),
  };
  s.groups = {GroupSpec{24, 2}, GroupSpec{40, 2}, GroupSpec{48, 1}, GroupSpec{96, 2}};
  Layer last = make_layer("head_conv", LayerKind::Conv, 1, 96, 576, 1, 0);
  last.pool = PoolSpec{.global = true};
  s.head = {
      last,
      make_layer("head_fc1", LayerKind::Fc, 1, 576, 1024, 1, 0),
      make_layer("head_fc2", LayerKind::Fc, 1, 1024, 10, 1, 0),
  };
  return s;
}

void SearchSpace::validate() const {
  check_options(kernel_options, "kernel_options");
  check_options(expand_options, "expand_options");
  check_options(depth_options, "depth_options");
  for (int d : depth_options)
    if (d > kMaxDepth) throw ParseError("depth_options: depth above " + std::to_string(kMaxDepth));
  for (int g = 0; g < kGroups; ++g) {
    if (groups[g].out_channels < 1) throw ParseError("groups[" + std::to_string(g) + "].out_channels must be >= 1");
    if (groups[g].stride < 1) throw ParseError("groups[" + std::to_string(g) + "].stride must be >= 1");
  }
  if (!head.empty() && head.front().c_in != groups.back().out_channels && head.front().kind != LayerKind::Fc)
    throw ParseError("head[0].c_in must match the last group's out_channels");
}

const std::vector<int>& SearchSpace::options_for(int index) const {
  if (index < 0 || index >= kGenomeLength) throw ConfigError("gene index out of range");
  if (index < kGroups) return depth_options;
  return (index - kGroups) % 2 == 0 ? kernel_options : expand_options;
}

SearchSpace search_space_from_json(const json& doc) {
  try {
    SearchSpace s;
    if (doc.contains("input_shape")) {
      const auto& shape = doc.at("input_shape");
      if (!shape.is_array() || shape.size() != 3) throw ParseError("input_shape: expected [C, H, W]");
      s.input_shape = {shape[0].get<int>(), shape[1].get<int>(), shape[2].get<int>()};
    }
    if (doc.contains("kernel_options")) s.kernel_options = doc.at("kernel_options").get<std::vector<int>>();
    if (doc.contains("expand_options")) s.expand_options = doc.at("expand_options").get<std::vector<int>>();
    if (doc.contains("depth_options")) s.depth_options = doc.at("depth_options").get<std::vector<int>>();
    const auto& groups = doc.at("groups");
    if (!groups.is_array() || groups.size() != kGroups)
      throw ParseError("groups: expected exactly " + std::to_string(kGroups) + " groups");
    for (int g = 0; g < kGroups; ++g) {
      s.groups[g].out_channels = groups[g].at("out_channels").get<int>();
      s.groups[g].stride = groups[g].value("stride", 1);
    }
    s.stem = layers_from_json(doc.value("stem", json::array()), "stem");
    s.head = layers_from_json(doc.value("head", json::array()), "head");
    s.validate();
    return s;
  } catch (const json::exception& e) {
    throw ParseError(std::string("search space: ") + e.what());
  }
}

SearchSpace parse_search_space(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed search-space document: ") + e.what());
  }
  return search_space_from_json(doc);
}

ordered_json search_space_to_json(const SearchSpace& s) {
  ordered_json doc;
  doc["input_shape"] = {s.input_shape.channels, s.input_shape.height, s.input_shape.width};
  doc["kernel_options"] = s.kernel_options;
  doc["expand_options"] = s.expand_options;
  doc["depth_options"] = s.depth_options;
  Network stem{s.stem, s.input_shape};
  Network head{s.head, s.input_shape};
  doc["stem"] = network_to_json(stem)["layers"];
  auto groups = ordered_json::array();
  for (const auto& g : s.groups) groups.push_back({{"out_channels", g.out_channels}, {"stride", g.stride}});
  doc["groups"] = std::move(groups);
  doc["head"] = network_to_json(head)["layers"];
  return doc;
}

// ---------------------------------------------------------------------------
// Genome

Genome Genome::uniform(int depth, int kernel, int expand) {
  Genome g;
  for (int i = 0; i < kGroups; ++i) g.genes[depth_index(i)] = depth;
  for (int i = 0; i < kGroups; ++i)
    for (int j = 0; j < kMaxDepth; ++j) {
      g.genes[kernel_index(i, j)] = kernel;
      g.genes[expand_index(i, j)] = expand;
    }
  return g;
}

Genome Genome::smallest(const SearchSpace& s) {
  return uniform(*std::min_element(s.depth_options.begin(), s.depth_options.end()),
                 *std::min_element(s.kernel_options.begin(), s.kernel_options.end()),
                 *std::min_element(s.expand_options.begin(), s.expand_options.end()));
}

Genome Genome::largest(const SearchSpace& s) {
  return uniform(*std::max_element(s.depth_options.begin(), s.depth_options.end()),
                 *std::max_element(s.kernel_options.begin(), s.kernel_options.end()),
                 *std::max_element(s.expand_options.begin(), s.expand_options.end()));
}

Genome Genome::random(const SearchSpace& s, std::mt19937_64& rng) {
  Genome g;
  for (int i = 0; i < kGenomeLength; ++i) {
    const auto& opts = s.options_for(i);
    std::uniform_int_distribution<std::size_t> pick(0, opts.size() - 1);
    g.genes[i] = opts[pick(rng)];
  }
  return g;
}

std::string Genome::to_string() const {
  std::string out;
  for (int i = 0; i < kGenomeLength; ++i) {
    if (i) out += ',';
    out += std::to_string(genes[i]);
  }
  return out;
}

std::string Genome::digest() const { return digest_hex(to_string()); }

void validate_genome(const Genome& g, const SearchSpace& space) {
  for (int i = 0; i < kGenomeLength; ++i) {
    const auto& opts = space.options_for(i);
    if (std::find(opts.begin(), opts.end(), g.genes[i]) == opts.end())
      throw ConfigError("gene " + std::to_string(i) + " has value " + std::to_string(g.genes[i]) +
                        " outside its option set");
  }
}

Network decode_genome(const Genome& g, const SearchSpace& space, std::optional<Shape3> input_shape) {
  validate_genome(g, space);
  Network net;
  net.input_shape = input_shape.value_or(space.input_shape);
  net.layers = space.stem;
  int channels = stem_channels(space);
  for (int gi = 0; gi < kGroups; ++gi) {
    const GroupSpec& group = space.groups[gi];
    for (int slot = 0; slot < g.depth(gi); ++slot) {
      const int k = g.kernel(gi, slot);
      const int mid = g.expand(gi, slot) * channels;
      const int stride = slot == 0 ? group.stride : 1;
      const std::string prefix = "g" + std::to_string(gi) + "_b" + std::to_string(slot);
      net.layers.push_back(make_layer(prefix + "_expand", LayerKind::Conv, 1, channels, mid, 1, 0));
      net.layers.push_back(make_layer(prefix + "_dw", LayerKind::DwConv, k, mid, mid, stride, k / 2));
      net.layers.push_back(make_layer(prefix + "_project", LayerKind::Conv, 1, mid, group.out_channels, 1, 0));
      channels = group.out_channels;
    }
  }
  net.layers.insert(net.layers.end(), space.head.begin(), space.head.end());
  return infer_shapes(std::move(net));
}

std::int64_t searchable_parameter_count(const Genome& g, const SearchSpace& space) {
  validate_genome(g, space);
  std::int64_t total = 0;
  std::int64_t channels = stem_channels(space);
  for (int gi = 0; gi < kGroups; ++gi) {
    const std::int64_t out = space.groups[gi].out_channels;
    for (int slot = 0; slot < g.depth(gi); ++slot) {
      const std::int64_t k = g.kernel(gi, slot);
      const std::int64_t mid = g.expand(gi, slot) * channels;
      total += channels * mid + k * k * mid + mid * out;
      channels = out;
    }
  }
  return total;
}

// ---------------------------------------------------------------------------
// Surrogate

AccuracySurrogate AccuracySurrogate::calibrated(const SearchSpace& space) {
  const double lo = static_cast<double>(searchable_parameter_count(Genome::smallest(space), space));
  const double hi = static_cast<double>(searchable_parameter_count(Genome::largest(space), space));
  const double target = kHighAnchor / kLowAnchor;
  if (!(hi / lo > target))
    throw ConfigError("search space too narrow to calibrate the surrogate (largest/smallest parameter ratio " +
                      std::to_string(hi / lo) + ")");
  // ln(1 + hi/p0) / ln(1 + lo/p0) rises from 1 to hi/lo as p0 grows.
  auto ratio = [&](double p0) { return std::log1p(hi / p0) / std::log1p(lo / p0); };
  double a = std::log(lo) - 40.0, b = std::log(hi) + 40.0;
  for (int it = 0; it < 200; ++it) {
    const double m = 0.5 * (a + b);
    if (ratio(std::exp(m)) < target)
      a = m;
    else
      b = m;
  }
  AccuracySurrogate s;
  s.p0_ = std::exp(0.5 * (a + b));
  s.alpha_ = kLowAnchor / std::log1p(lo / s.p0_);
  return s;
}

AccuracySurrogate AccuracySurrogate::from_table(std::map<std::string, double> table) {
  for (const auto& [k, v] : table)
    if (!(v >= 0.0 && v <= 1.0)) throw ParseError("accuracy table: value for " + k + " outside [0, 1]");
  AccuracySurrogate s;
  s.table_ = std::move(table);
  return s;
}

AccuracySurrogate AccuracySurrogate::from_table_json(std::string_view text) {
  try {
    return from_table(json::parse(text).get<std::map<std::string, double>>());
  } catch (const json::exception& e) {
    throw ParseError(std::string("accuracy table: ") + e.what());
  }
}

double AccuracySurrogate::score_params(std::int64_t params) const {
  const double v = alpha_ * std::log1p(static_cast<double>(params) / p0_);
  return std::clamp(v, 0.0, 1.0);
}

double AccuracySurrogate::score(const Genome& g, const SearchSpace& space) const {
  if (table_) {
    auto it = table_->find(g.digest());
    if (it == table_->end()) throw ConfigError("accuracy table has no entry for genome " + g.digest());
    return it->second;
  }
  return score_params(searchable_parameter_count(g, space));
}

// ---------------------------------------------------------------------------
// NSGA-II primitives

bool dominates(const ObjectivePoint& a, const ObjectivePoint& b) {
  if (a.feasible != b.feasible) return a.feasible;
  if (!a.feasible) return a.violation < b.violation;
  const bool no_worse = a.accuracy >= b.accuracy && a.cycles <= b.cycles;
  const bool better = a.accuracy > b.accuracy || a.cycles < b.cycles;
  return no_worse && better;
}

std::vector<int> fast_nondominated_sort(std::span<const ObjectivePoint> pts) {
  const std::size_t n = pts.size();
  std::vector<std::vector<std::size_t>> dominated(n);
  std::vector<int> count(n, 0), rank(n, 0);
  std::vector<std::size_t> current;
  for (std::size_t p = 0; p < n; ++p) {
    for (std::size_t q = 0; q < n; ++q) {
      if (p == q) continue;
      if (dominates(pts[p], pts[q]))
        dominated[p].push_back(q);
      else if (dominates(pts[q], pts[p]))
        ++count[p];
    }
    if (count[p] == 0) current.push_back(p);
  }
  int front = 0;
  while (!current.empty()) {
    std::vector<std::size_t> next;
    for (auto p : current) {
      rank[p] = front;
      for (auto q : dominated[p])
        if (--count[q] == 0) next.push_back(q);
    }
    std::sort(next.begin(), next.end());
    current = std::move(next);
    ++front;
  }
  return rank;
}

std::vector<std::vector<int>> fronts_from_ranks(std::span<const int> ranks) {
  std::vector<std::vector<int>> fronts;
  for (std::size_t i = 0; i < ranks.size(); ++i) {
    if (static_cast<std::size_t>(ranks[i]) >= fronts.size()) fronts.resize(ranks[i] + 1);
    fronts[ranks[i]].push_back(static_cast<int>(i));
  }
  return fronts;
}

std::vector<double> crowding_distance(std::span<const ObjectivePoint> front) {
  const std::size_t n = front.size();
  constexpr double inf = std::numeric_limits<double>::infinity();
  if (n <= 2) return std::vector<double>(n, inf);
  std::vector<double> dist(n, 0.0);
  auto accumulate = [&](auto value) {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return value(front[a]) < value(front[b]); });
    dist[order.front()] = inf;
    dist[order.back()] = inf;
    const double range = value(front[order.back()]) - value(front[order.front()]);
    if (range <= 0.0) return;
    for (std::size_t k = 1; k + 1 < n; ++k)
      dist[order[k]] += (value(front[order[k + 1]]) - value(front[order[k - 1]])) / range;
  };
  accumulate([](const ObjectivePoint& p) { return p.accuracy; });
  accumulate([](const ObjectivePoint& p) { return p.cycles; });
  return dist;
}

double hypervolume(std::span<const ObjectivePoint> points, double ref_cycles) {
  std::vector<std::pair<double, double>> pts;  // (1 - accuracy, cycles)
  for (const auto& p : points)
    if (p.feasible && p.accuracy > 0.0 && p.cycles < ref_cycles) pts.emplace_back(1.0 - p.accuracy, p.cycles);
  std::sort(pts.begin(), pts.end());
  double volume = 0.0;
  double floor = ref_cycles;
  for (const auto& [f1, f2] : pts) {
    if (f2 >= floor) continue;
    volume += (1.0 - f1) * (floor - f2);
    floor = f2;
  }
  return volume;
}

ObjectivePoint Candidate::objectives() const {
  return {accuracy, static_cast<double>(total_cycles), feasible, violation};
}

// ---------------------------------------------------------------------------
// Evaluation

Evaluator::Evaluator(SearchSpace space, HWConfig hw, AccuracySurrogate surrogate, std::int64_t n_samples,
                     unsigned threads)
    : space_(std::move(space)),
      hw_(hw),
      surrogate_(std::move(surrogate)),
      n_samples_(n_samples),
      threads_(threads ? threads : std::max(1u, std::thread::hardware_concurrency())) {
  space_.validate();
  hw_.validate();
  if (n_samples_ < 1) throw ConfigError("n_samples must be >= 1");
}

Candidate Evaluator::evaluate(const Genome& g) const {
  const Network net = decode_genome(g, space_);
  Candidate c;
  c.genome = g;
  c.evaluated = true;
  c.accuracy = surrogate_.score(g, space_);
  CompileOptions opts;
  opts.duplicate = hw_.bounded();
  const CompileResult compiled = try_compile(net, hw_, opts);
  c.containers_used = compiled.plan.containers_used;
  c.utilization = utilization(compiled.plan);
  if (compiled.feasible()) {
    c.feasible = true;
    c.total_cycles = simulate(compiled.plan, net, n_samples_).total_cycles;
  } else {
    c.feasible = false;
    c.violation = static_cast<double>(compiled.unplaced_area());
  }
  return c;
}

std::size_t Evaluator::cache_size() const {
  std::lock_guard lock(mu_);
  return cache_.size();
}

void Evaluator::evaluate_all(std::vector<Candidate>& candidates) {
  std::vector<Genome> work;
  {
    std::lock_guard lock(mu_);
    for (const auto& c : candidates)
      if (!c.evaluated && !cache_.contains(c.genome)) work.push_back(c.genome);
  }
  std::sort(work.begin(), work.end());
  work.erase(std::unique(work.begin(), work.end()), work.end());

  std::vector<Candidate> results(work.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  auto worker = [&] {
    for (std::size_t i = next++; i < work.size(); i = next++) {
      try {
        results[i] = evaluate(work[i]);
      } catch (...) {
        std::lock_guard lock(failure_mu);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const unsigned n_threads = static_cast<unsigned>(std::min<std::size_t>(threads_, work.size()));
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  std::lock_guard lock(mu_);
  for (auto& r : results) cache_.emplace(r.genome, r);
  for (auto& c : candidates)
    if (!c.evaluated) c = cache_.at(c.genome);
}

// ---------------------------------------------------------------------------
// Generational loop

void rank_population(std::span<const Candidate> pop, std::vector<int>& rank, std::vector<double>& crowding) {
  std::vector<ObjectivePoint> pts;
  pts.reserve(pop.size());
  for (const auto& c : pop) pts.push_back(c.objectives());
  rank = fast_nondominated_sort(pts);
  crowding.assign(pop.size(), 0.0);
  for (const auto& front : fronts_from_ranks(rank)) {
    std::vector<ObjectivePoint> members;
    for (int i : front) members.push_back(pts[i]);
    const auto d = crowding_distance(members);
    for (std::size_t k = 0; k < front.size(); ++k) crowding[front[k]] = d[k];
  }
}

std::vector<std::size_t> select_survivors(std::span<const Candidate> pool, std::size_t n) {
  std::vector<int> rank;
  std::vector<double> crowd;
  rank_population(pool, rank, crowd);
  std::vector<std::size_t> keep;
  for (const auto& front : fronts_from_ranks(rank)) {
    if (keep.size() >= n) break;
    std::vector<std::size_t> members(front.begin(), front.end());
    if (keep.size() + members.size() > n) {
      std::stable_sort(members.begin(), members.end(), [&](auto a, auto b) { return crowd[a] > crowd[b]; });
      members.resize(n - keep.size());
    }
    keep.insert(keep.end(), members.begin(), members.end());
  }
  return keep;
}

std::vector<Candidate> evolve(const std::vector<Candidate>& pop, Evaluator& evaluator, std::mt19937_64& rng,
                              const NsgaParams& params) {
  const std::size_t n = pop.size();
  if (n == 0) return {};
  std::vector<int> rank;
  std::vector<double> crowd;
  rank_population(pop, rank, crowd);

  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  auto tournament = [&] {
    const std::size_t a = pick(rng), b = pick(rng);
    if (rank[a] != rank[b]) return rank[a] < rank[b] ? a : b;
    return crowd[b] > crowd[a] ? b : a;
  };

  std::uniform_int_distribution<int> coin(0, 1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> gene(0, kGenomeLength - 1);
  const SearchSpace& space = evaluator.space();

  std::vector<Candidate> offspring(n);
  for (std::size_t k = 0; k < n; ++k) {
    const Genome& p1 = pop[tournament()].genome;
    const Genome& p2 = pop[tournament()].genome;
    Genome child;
    for (int i = 0; i < kGenomeLength; ++i) child.genes[i] = coin(rng) ? p2.genes[i] : p1.genes[i];
    if (unit(rng) < params.mutation) {
      const int i = gene(rng);
      const auto& opts = space.options_for(i);
      std::uniform_int_distribution<std::size_t> value(0, opts.size() - 1);
      child.genes[i] = opts[value(rng)];
    }
    offspring[k].genome = child;
  }
  evaluator.evaluate_all(offspring);

  std::vector<Candidate> pool = pop;
  pool.insert(pool.end(), offspring.begin(), offspring.end());
  std::vector<Candidate> next;
  next.reserve(n);
  for (auto i : select_survivors(pool, n)) next.push_back(pool[i]);
  return next;
}

namespace {

void update_archive(std::vector<Candidate>& archive, std::span<const Candidate> pop) {
  for (const auto& c : pop) {
    if (!c.feasible) continue;
    const auto p = c.objectives();
    bool skip = false;
    for (const auto& a : archive) {
      const auto q = a.objectives();
      if (dominates(q, p) || (a.genome == c.genome) || (q.accuracy == p.accuracy && q.cycles == p.cycles)) {
        skip = true;
        break;
      }
    }
    if (skip) continue;
    std::erase_if(archive, [&](const Candidate& a) { return dominates(p, a.objectives()); });
    archive.push_back(c);
  }
  std::sort(archive.begin(), archive.end(), [](const Candidate& a, const Candidate& b) {
    if (a.total_cycles != b.total_cycles) return a.total_cycles < b.total_cycles;
    return a.genome < b.genome;
  });
}

double archive_hypervolume(std::span<const Candidate> archive, double ref) {
  std::vector<ObjectivePoint> pts;
  for (const auto& c : archive) pts.push_back(c.objectives());
  return hypervolume(pts, ref);
}

}  // namespace

Candidate select_preferred(std::span<const Candidate> front, Preference pref) {
  if (front.empty()) throw SearchInfeasible("empty Pareto front");
  auto better = [pref](const Candidate& a, const Candidate& b) {
    if (pref == Preference::Speed) {
      if (a.total_cycles != b.total_cycles) return a.total_cycles < b.total_cycles;
      if (a.accuracy != b.accuracy) return a.accuracy > b.accuracy;
    } else {
      if (a.accuracy != b.accuracy) return a.accuracy > b.accuracy;
      if (a.total_cycles != b.total_cycles) return a.total_cycles < b.total_cycles;
    }
    return a.genome < b.genome;
  };
  return *std::min_element(front.begin(), front.end(), better);
}

SearchResult search(Evaluator& evaluator, Preference pref, const NsgaParams& params) {
  if (params.population < 2) throw ConfigError("population must be >= 2");
  if (params.generations < 0) throw ConfigError("generations must be >= 0");
  if (params.mutation < 0.0 || params.mutation > 1.0) throw ConfigError("mutation probability must be in [0, 1]");

  const SearchSpace& space = evaluator.space();
  std::mt19937_64 rng(params.seed);
  std::vector<Candidate> pop;
  if (params.seed_extremes) {
    pop.push_back({.genome = Genome::smallest(space)});
    pop.push_back({.genome = Genome::largest(space)});
  }
  while (pop.size() < static_cast<std::size_t>(params.population)) pop.push_back({.genome = Genome::random(space, rng)});
  pop.resize(params.population);
  evaluator.evaluate_all(pop);

  SearchResult result;
  result.hv_reference_cycles = params.hv_reference_cycles;
  auto record = [&](std::span<const Candidate> current) {
    update_archive(result.archive, current);
    if (result.hv_reference_cycles <= 0.0) {
      double worst = 0.0;
      for (const auto& c : current)
        if (c.feasible) worst = std::max(worst, static_cast<double>(c.total_cycles));
      if (worst > 0.0) result.hv_reference_cycles = 1.1 * worst;
    }
    result.hypervolume_history.push_back(
        result.hv_reference_cycles > 0.0 ? archive_hypervolume(result.archive, result.hv_reference_cycles) : 0.0);
  };
  record(pop);
  for (int gen = 0; gen < params.generations; ++gen) {
    pop = evolve(pop, evaluator, rng, params);
    record(pop);
  }

  std::vector<int> rank;
  std::vector<double> crowd;
  rank_population(pop, rank, crowd);
  for (std::size_t i = 0; i < pop.size(); ++i) {
    if (rank[i] != 0 || !pop[i].feasible) continue;
    const bool seen = std::any_of(result.front.begin(), result.front.end(),
                                  [&](const Candidate& c) { return c.genome == pop[i].genome; });
    if (!seen) result.front.push_back(pop[i]);
  }
  if (result.front.empty())
    throw SearchInfeasible("no candidate fits " + std::to_string(evaluator.hw().num_xbars) +
                           " crossbars; increase the crossbar budget");
  std::sort(result.front.begin(), result.front.end(), [](const Candidate& a, const Candidate& b) {
    if (a.total_cycles != b.total_cycles) return a.total_cycles < b.total_cycles;
    if (a.accuracy != b.accuracy) return a.accuracy > b.accuracy;
    return a.genome < b.genome;
  });
  result.chosen = select_preferred(result.front, pref);
  result.final_population = std::move(pop);
  return result;
}

std::string pareto_csv(std::span<const Candidate> candidates) {
  std::ostringstream os;
  for (int g = 0; g < kGroups; ++g) os << 'd' << g << ',';
  for (int g = 0; g < kGroups; ++g)
    for (int s = 0; s < kMaxDepth; ++s) os << 'k' << g << '_' << s << ",e" << g << '_' << s << ',';
  os << "surrogate_accuracy,total_cycles,containers_used,utilization,feasible\n";
  char buf[64];
  for (const auto& c : candidates) {
    for (int v : c.genome.genes) os << v << ',';
    std::snprintf(buf, sizeof buf, "%.6f", c.accuracy);
    os << buf << ',' << c.total_cycles << ',' << c.containers_used << ',';
    std::snprintf(buf, sizeof buf, "%.6f", c.utilization);
    os << buf << ',' << (c.feasible ? 1 : 0) << '\n';
  }
  return os.str();
}

}  // namespace xbarc
