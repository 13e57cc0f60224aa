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

/**
 * @file nas.hpp
 * @brief Hardware-aware architecture search with NSGA-II.
 *
 * Candidates are inverted-bottleneck networks drawn from a four-group space
 * (depth, kernel and expand ratio per slot). Each candidate is compiled onto
 * the crossbar budget and simulated; the two objectives are a surrogate
 * accuracy (maximized) and total cycles (minimized). Candidates that do not
 * fit the budget are infeasible and ranked by their unplaced area.
 */

#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "xbarc/network.hpp"

namespace xbarc {

inline constexpr int kGroups = 4;
inline constexpr int kMaxDepth = 4;
inline constexpr int kGenomeLength = kGroups + kGroups * kMaxDepth * 2;

struct GroupSpec {
  int out_channels = 0;
  /// Stride of the first block of the group; later blocks use 1.
  int stride = 1;
};

struct SearchSpace {
  std::vector<int> kernel_options{3, 5, 7};
  std::vector<int> expand_options{3, 4, 6};
  std::vector<int> depth_options{2, 3, 4};
  std::array<GroupSpec, kGroups> groups{};
  Shape3 input_shape{3, 64, 64};
  /// Fixed layers before and after the searchable groups.
  std::vector<Layer> stem;
  std::vector<Layer> head;

  /// MobileNetV3-small layout for 64x64, 10-class inputs.
  static SearchSpace mobilenet_v3_small();
  void validate() const;
  /// Option set of gene `index`.
  const std::vector<int>& options_for(int index) const;
};

SearchSpace parse_search_space(std::string_view text);
SearchSpace search_space_from_json(const nlohmann::json& doc);
nlohmann::ordered_json search_space_to_json(const SearchSpace& space);

/// 36 integer genes: depth per group, then (kernel, expand) per slot.
/// Slots beyond a group's depth are carried but ignored by the decoder.
struct Genome {
  std::array<int, kGenomeLength> genes{};

  static constexpr int depth_index(int group) { return group; }
  static constexpr int kernel_index(int group, int slot) { return kGroups + (group * kMaxDepth + slot) * 2; }
  static constexpr int expand_index(int group, int slot) { return kernel_index(group, slot) + 1; }

  int depth(int group) const { return genes[depth_index(group)]; }
  int kernel(int group, int slot) const { return genes[kernel_index(group, slot)]; }
  int expand(int group, int slot) const { return genes[expand_index(group, slot)]; }

  /// Every gene at its fixed value.
  static Genome uniform(int depth, int kernel, int expand);
  static Genome smallest(const SearchSpace& space);
  static Genome largest(const SearchSpace& space);
  static Genome random(const SearchSpace& space, std::mt19937_64& rng);

  std::string digest() const;
  std::string to_string() const;
  auto operator<=>(const Genome&) const = default;
};

void validate_genome(const Genome& g, const SearchSpace& space);

/// Builds and shape-infers the candidate network. Throws ConfigError on a
/// gene outside its option set.
Network decode_genome(const Genome& g, const SearchSpace& space, std::optional<Shape3> input_shape = std::nullopt);

/// Weight cells owned by the searchable groups of a genome.
std::int64_t searchable_parameter_count(const Genome& g, const SearchSpace& space);

/// Stand-in for supernet evaluation. The default model is
/// min(1, alpha * ln(1 + p / p0)) over the searchable-group parameter count p,
/// with alpha and p0 calibrated so the smallest genome scores 0.5 and the
/// largest 0.95. A lookup table keyed by genome digest overrides it.
class AccuracySurrogate {
 public:
  static constexpr double kLowAnchor = 0.5;
  static constexpr double kHighAnchor = 0.95;

  static AccuracySurrogate calibrated(const SearchSpace& space);
  static AccuracySurrogate from_table(std::map<std::string, double> table);
  static AccuracySurrogate from_table_json(std::string_view text);

  double score(const Genome& g, const SearchSpace& space) const;
  /// Default model applied to a parameter count.
  double score_params(std::int64_t params) const;

  double alpha() const noexcept { return alpha_; }
  double p0() const noexcept { return p0_; }
  bool table_mode() const noexcept { return table_.has_value(); }

 private:
  double alpha_ = 0.0;
  double p0_ = 1.0;
  std::optional<std::map<std::string, double>> table_;
};

struct ObjectivePoint {
  double accuracy = 0.0;
  double cycles = 0.0;
  bool feasible = true;
  double violation = 0.0;
};

/// Constrained domination: feasible beats infeasible, smaller violation beats
/// larger, otherwise Pareto dominance (accuracy up, cycles down).
bool dominates(const ObjectivePoint& a, const ObjectivePoint& b);

/// Front index per point (0 = non-dominated).
std::vector<int> fast_nondominated_sort(std::span<const ObjectivePoint> points);
std::vector<std::vector<int>> fronts_from_ranks(std::span<const int> ranks);

/// NSGA-II crowding distance over (accuracy, cycles) within one front.
std::vector<double> crowding_distance(std::span<const ObjectivePoint> front);

/// Area dominated by the feasible points, minimizing (1 - accuracy, cycles)
/// against the reference (1, ref_cycles).
double hypervolume(std::span<const ObjectivePoint> points, double ref_cycles);

struct Candidate {
  Genome genome;
  bool evaluated = false;
  double accuracy = 0.0;
  std::int64_t total_cycles = 0;
  int containers_used = 0;
  double utilization = 0.0;
  bool feasible = false;
  /// Unplaced cells when packing fails.
  double violation = 0.0;

  ObjectivePoint objectives() const;
};

class Evaluator {
 public:
  Evaluator(SearchSpace space, HWConfig hw, AccuracySurrogate surrogate, std::int64_t n_samples = 1,
            unsigned threads = 0);

  /// Pure: decode, compile with duplication, simulate.
  Candidate evaluate(const Genome& g) const;
  /// Fills every unevaluated candidate, in parallel, memoized by genome.
  void evaluate_all(std::vector<Candidate>& candidates);

  const SearchSpace& space() const noexcept { return space_; }
  const HWConfig& hw() const noexcept { return hw_; }
  std::size_t cache_size() const;

 private:
  SearchSpace space_;
  HWConfig hw_;
  AccuracySurrogate surrogate_;
  std::int64_t n_samples_;
  unsigned threads_;
  mutable std::mutex mu_;
  std::map<Genome, Candidate> cache_;
};

struct NsgaParams {
  int population = 50;
  int generations = 100;
  /// Probability that an offspring gets one gene resampled.
  double mutation = 0.25;
  std::uint64_t seed = 1;
  /// Put the smallest and largest genome into the initial population.
  bool seed_extremes = true;
  /// Hypervolume reference; <= 0 derives 1.1x the worst feasible cycles of
  /// the first generation that has a feasible candidate.
  double hv_reference_cycles = 0.0;
};

/// Rank and crowding of every member of `pop`.
void rank_population(std::span<const Candidate> pop, std::vector<int>& rank, std::vector<double>& crowding);

/// Keeps `n` members of `pool` by (rank, crowding); returns their indices.
std::vector<std::size_t> select_survivors(std::span<const Candidate> pool, std::size_t n);

/// One elitist generation: tournament, uniform crossover, mutation,
/// evaluation, survivor selection.
std::vector<Candidate> evolve(const std::vector<Candidate>& pop, Evaluator& evaluator, std::mt19937_64& rng,
                              const NsgaParams& params);

enum class Preference { Accuracy, Speed };

struct SearchResult {
  /// Feasible rank-0 members of the final population, by cycles.
  std::vector<Candidate> front;
  Candidate chosen;
  /// Every feasible non-dominated candidate seen during the run.
  std::vector<Candidate> archive;
  std::vector<double> hypervolume_history;
  double hv_reference_cycles = 0.0;
  std::vector<Candidate> final_population;
};

Candidate select_preferred(std::span<const Candidate> front, Preference pref);

/// Throws SearchInfeasible when no feasible candidate survives.
SearchResult search(Evaluator& evaluator, Preference pref, const NsgaParams& params);

/// Header: genes, surrogate_accuracy, total_cycles, containers_used,
/// utilization, feasible.
std::string pareto_csv(std::span<const Candidate> candidates);

}  // namespace xbarc
