#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "randinf/design.hpp"

namespace randinf {

/// One realized randomization. For RCB, treatment_at(i, j) is the
/// treatment given to plot j of block i (row i is a permutation of
/// 0..T-1). For LS it is the symbol in cell (i, j) of a Latin square.
/// Treatments are zero-based.
class Assignment {
 public:
  /// Validates the bijection / Latin property; throws Error{InvalidArgument}.
  Assignment(Design design, std::size_t rows, std::size_t treatments,
             std::vector<std::uint8_t> labels);

  struct Unchecked {};
  Assignment(Design design, std::size_t rows, std::size_t treatments,
             std::vector<std::uint8_t> labels, Unchecked) noexcept;

  Design design() const noexcept { return design_; }
  std::size_t rows() const noexcept { return rows_; }
  std::size_t treatments() const noexcept { return treatments_; }

  std::size_t treatment_at(std::size_t i, std::size_t j) const noexcept {
    return labels_[i * treatments_ + j];
  }
  /// W_ij(t)
  bool indicator(std::size_t i, std::size_t j, std::size_t t) const noexcept {
    return treatment_at(i, j) == t;
  }
  std::span<const std::uint8_t> labels() const noexcept { return labels_; }

  bool is_valid() const noexcept;

  friend bool operator==(const Assignment&, const Assignment&) = default;

 private:
  Design design_;
  std::size_t rows_;
  std::size_t treatments_;
  std::vector<std::uint8_t> labels_;
};

/// Single-consumer, restartable stream of assignments.
class AssignmentStream {
 public:
  virtual ~AssignmentStream() = default;
  virtual std::optional<Assignment> next() = 0;
  virtual void reset() = 0;
};

enum class SpaceKind { ExactEnumeration, UniformSample };

/// Randomization measure for Latin squares: uniform over every square of
/// the order, or over row/column/symbol permutations of the cyclic square.
enum class LatinMeasure { AllSquares, Isotopy };

inline constexpr std::uint64_t kDefaultEnumerationCap = 10'000'000;

/// Reads RANDINF_ENUM_CAP from the environment, else the default.
std::uint64_t default_enumeration_cap();

struct RandomizationSpace {
  SpaceKind kind = SpaceKind::ExactEnumeration;
  LatinMeasure measure = LatinMeasure::AllSquares;
  std::uint64_t sample_size = 0;
  std::uint64_t seed = 0;
  /// Markov moves between emitted Latin squares; default 2 T^3.
  std::optional<std::uint64_t> burn_in;
  std::uint64_t enumeration_cap = default_enumeration_cap();

  static RandomizationSpace exact(LatinMeasure measure = LatinMeasure::AllSquares) {
    RandomizationSpace s;
    s.measure = measure;
    return s;
  }
  static RandomizationSpace sampled(std::uint64_t count, std::uint64_t seed,
                                    std::optional<std::uint64_t> burn_in = std::nullopt) {
    RandomizationSpace s;
    s.kind = SpaceKind::UniformSample;
    s.sample_size = count;
    s.seed = seed;
    s.burn_in = burn_in;
    return s;
  }
};

/// (T!)^N, or nullopt on 64-bit overflow.
std::optional<std::uint64_t> rcb_space_size(std::size_t num_blocks, std::size_t treatments);
/// Number of Latin squares of the given order; known through order 7.
std::optional<std::uint64_t> latin_square_count(std::size_t order);
/// Size of the exact randomization space under the given design/measure.
std::optional<std::uint64_t> exact_space_size(Design design, std::size_t rows,
                                              std::size_t treatments,
                                              LatinMeasure measure = LatinMeasure::AllSquares);

/// Lexicographic order of the concatenated block permutations.
/// Throws Error{SpaceTooLarge} when (T!)^N exceeds the cap.
std::unique_ptr<AssignmentStream> enumerate_rcb(std::size_t num_blocks, std::size_t treatments,
                                                std::uint64_t cap = default_enumeration_cap());

/// Every Latin square of the order exactly once, row-major lexicographic,
/// by backtracking. Throws Error{SpaceTooLarge} past the cap.
std::unique_ptr<AssignmentStream> enumerate_latin_squares(
    std::size_t order, std::uint64_t cap = default_enumeration_cap());

/// All (T!)^3 row/column/symbol relabellings of the cyclic square, with
/// multiplicity.
std::unique_ptr<AssignmentStream> enumerate_isotopy_class(
    std::size_t order, std::uint64_t cap = default_enumeration_cap());

/// Independent uniform permutation per block (Fisher-Yates).
std::unique_ptr<AssignmentStream> sample_rcb(std::size_t num_blocks, std::size_t treatments,
                                             std::uint64_t count, std::uint64_t seed);

/// Jacobson-Matthews chain started at the cyclic square; burn_in proper
/// moves precede every emitted square.
std::unique_ptr<AssignmentStream> sample_latin_squares(
    std::size_t order, std::uint64_t count, std::uint64_t seed,
    std::optional<std::uint64_t> burn_in = std::nullopt);

/// Random row, column and symbol permutations of the cyclic square.
std::unique_ptr<AssignmentStream> sample_isotopy_class(std::size_t order, std::uint64_t count,
                                                       std::uint64_t seed);

/// Dispatches on design, kind and measure.
std::unique_ptr<AssignmentStream> open_stream(Design design, std::size_t rows,
                                              std::size_t treatments,
                                              const RandomizationSpace& space);

/// Drains the stream through fn; returns how many assignments were visited.
std::uint64_t for_each_assignment(Design design, std::size_t rows, std::size_t treatments,
                                  const RandomizationSpace& space,
                                  const std::function<void(const Assignment&)>& fn);

}  // namespace randinf
