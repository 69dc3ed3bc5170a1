#include "randinf/randomization.hpp"

#include <algorithm>
#include <cstdlib>
#include <numeric>
#include <random>
#include <string>
#include <utility>

#include "randinf/error.hpp"

namespace randinf {

Assignment::Assignment(Design design, std::size_t rows, std::size_t treatments,
                       std::vector<std::uint8_t> labels)
    : design_(design), rows_(rows), treatments_(treatments), labels_(std::move(labels)) {
  if (treatments_ == 0 || treatments_ > 256) {
    throw Error(ErrorCode::InvalidArgument, "treatment count must be in 1..256");
  }
  if (design_ == Design::Ls && rows_ != treatments_) {
    throw Error(ErrorCode::InvalidArgument, "a Latin square assignment must be T x T");
  }
  if (labels_.size() != rows_ * treatments_) {
    throw Error(ErrorCode::InvalidArgument, "assignment has the wrong number of cells");
  }
  if (!is_valid()) {
    throw Error(ErrorCode::InvalidArgument,
                design_ == Design::Rcb ? "block assignment is not a permutation"
                                       : "assignment is not a Latin square");
  }
}

Assignment::Assignment(Design design, std::size_t rows, std::size_t treatments,
                       std::vector<std::uint8_t> labels, Unchecked) noexcept
    : design_(design), rows_(rows), treatments_(treatments), labels_(std::move(labels)) {}

bool Assignment::is_valid() const noexcept {
  const std::size_t T = treatments_;
  if (labels_.size() != rows_ * T) return false;
  std::vector<char> seen(T);
  for (std::size_t i = 0; i < rows_; ++i) {
    std::fill(seen.begin(), seen.end(), 0);
    for (std::size_t j = 0; j < T; ++j) {
      const std::size_t t = treatment_at(i, j);
      if (t >= T || seen[t]) return false;
      seen[t] = 1;
    }
  }
  if (design_ == Design::Ls) {
    if (rows_ != T) return false;
    for (std::size_t j = 0; j < T; ++j) {
      std::fill(seen.begin(), seen.end(), 0);
      for (std::size_t i = 0; i < T; ++i) {
        const std::size_t t = treatment_at(i, j);
        if (seen[t]) return false;
        seen[t] = 1;
      }
    }
  }
  return true;
}

std::uint64_t default_enumeration_cap() {
  if (const char* env = std::getenv("RANDINF_ENUM_CAP")) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return v;
  }
  return kDefaultEnumerationCap;
}

std::optional<std::uint64_t> rcb_space_size(std::size_t num_blocks, std::size_t treatments) {
  std::uint64_t fact = 1;
  for (std::size_t k = 2; k <= treatments; ++k) {
    if (__builtin_mul_overflow(fact, k, &fact)) return std::nullopt;
  }
  std::uint64_t total = 1;
  for (std::size_t i = 0; i < num_blocks; ++i) {
    if (__builtin_mul_overflow(total, fact, &total)) return std::nullopt;
  }
  return total;
}

std::optional<std::uint64_t> latin_square_count(std::size_t order) {
  static constexpr std::uint64_t kCounts[] = {1,      1,          2,
                                              12,     576,        161280,
                                              812851200, 61479419904000ULL};
  if (order >= std::size(kCounts)) return std::nullopt;
  return kCounts[order];
}

std::optional<std::uint64_t> exact_space_size(Design design, std::size_t rows,
                                              std::size_t treatments, LatinMeasure measure) {
  if (design == Design::Rcb) return rcb_space_size(rows, treatments);
  if (measure == LatinMeasure::AllSquares) return latin_square_count(treatments);
  return rcb_space_size(3, treatments);
}

namespace {

void require_within_cap(std::optional<std::uint64_t> size, std::uint64_t cap,
                        const std::string& what) {
  if (!size || *size > cap) {
    throw Error(ErrorCode::SpaceTooLarge,
                what + " has " + (size ? std::to_string(*size) : std::string("too many")) +
                    " assignments, above the exact-enumeration cap of " +
                    std::to_string(cap) + "; sample instead");
  }
}

std::vector<std::uint8_t> identity_permutation(std::size_t n) {
  std::vector<std::uint8_t> p(n);
  std::iota(p.begin(), p.end(), std::uint8_t{0});
  return p;
}

class RcbEnumerator final : public AssignmentStream {
 public:
  RcbEnumerator(std::size_t blocks, std::size_t treatments)
      : blocks_(blocks), treatments_(treatments) {
    reset();
  }

  std::optional<Assignment> next() override {
    if (done_) return std::nullopt;
    if (started_) {
      // Odometer over blocks; the last block varies fastest.
      std::size_t b = blocks_;
      bool advanced = false;
      while (b > 0) {
        --b;
        auto first = labels_.begin() + static_cast<std::ptrdiff_t>(b * treatments_);
        if (std::next_permutation(first, first + static_cast<std::ptrdiff_t>(treatments_))) {
          advanced = true;
          break;
        }
      }
      if (!advanced) {
        done_ = true;
        return std::nullopt;
      }
    }
    started_ = true;
    return Assignment(Design::Rcb, blocks_, treatments_, labels_, Assignment::Unchecked{});
  }

  void reset() override {
    labels_.clear();
    for (std::size_t b = 0; b < blocks_; ++b) {
      const auto p = identity_permutation(treatments_);
      labels_.insert(labels_.end(), p.begin(), p.end());
    }
    started_ = false;
    done_ = blocks_ == 0;
  }

 private:
  std::size_t blocks_;
  std::size_t treatments_;
  std::vector<std::uint8_t> labels_;
  bool started_ = false;
  bool done_ = false;
};

class LatinSquareEnumerator final : public AssignmentStream {
 public:
  explicit LatinSquareEnumerator(std::size_t order) : n_(order) { reset(); }

  std::optional<Assignment> next() override {
    if (done_) return std::nullopt;
    const std::size_t cells = n_ * n_;
    std::size_t pos = 0;
    std::size_t try_from = 0;
    if (started_) {
      pos = cells - 1;
      try_from = release(pos) + 1;
    }
    started_ = true;
    for (;;) {
      if (place_smallest(pos, try_from)) {
        if (pos + 1 == cells) {
          return Assignment(Design::Ls, n_, n_, cells_, Assignment::Unchecked{});
        }
        ++pos;
        try_from = 0;
      } else {
        if (pos == 0) {
          done_ = true;
          return std::nullopt;
        }
        --pos;
        try_from = release(pos) + 1;
      }
    }
  }

  void reset() override {
    cells_.assign(n_ * n_, 0);
    row_used_.assign(n_, 0);
    col_used_.assign(n_, 0);
    started_ = false;
    done_ = n_ == 0;
  }

 private:
  bool place_smallest(std::size_t pos, std::size_t from) {
    const std::size_t i = pos / n_;
    const std::size_t j = pos % n_;
    const std::uint32_t taken = row_used_[i] | col_used_[j];
    for (std::size_t v = from; v < n_; ++v) {
      const std::uint32_t bit = 1u << v;
      if (taken & bit) continue;
      cells_[pos] = static_cast<std::uint8_t>(v);
      row_used_[i] |= bit;
      col_used_[j] |= bit;
      return true;
    }
    return false;
  }

  std::size_t release(std::size_t pos) {
    const std::size_t v = cells_[pos];
    const std::uint32_t mask = ~(1u << v);
    row_used_[pos / n_] &= mask;
    col_used_[pos % n_] &= mask;
    return v;
  }

  std::size_t n_;
  std::vector<std::uint8_t> cells_;
  std::vector<std::uint32_t> row_used_;
  std::vector<std::uint32_t> col_used_;
  bool started_ = false;
  bool done_ = false;
};

std::vector<std::uint8_t> relabel_cyclic(std::span<const std::uint8_t> row_perm,
                                         std::span<const std::uint8_t> col_perm,
                                         std::span<const std::uint8_t> symbol_perm) {
  const std::size_t n = row_perm.size();
  std::vector<std::uint8_t> sq(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      sq[i * n + j] = symbol_perm[(row_perm[i] + col_perm[j]) % n];
    }
  }
  return sq;
}

class IsotopyEnumerator final : public AssignmentStream {
 public:
  explicit IsotopyEnumerator(std::size_t order) : n_(order) { reset(); }

  std::optional<Assignment> next() override {
    if (done_) return std::nullopt;
    if (started_) {
      if (!std::next_permutation(symbols_.begin(), symbols_.end()) &&
          !std::next_permutation(cols_.begin(), cols_.end()) &&
          !std::next_permutation(rows_.begin(), rows_.end())) {
        done_ = true;
        return std::nullopt;
      }
    }
    started_ = true;
    return Assignment(Design::Ls, n_, n_, relabel_cyclic(rows_, cols_, symbols_),
                      Assignment::Unchecked{});
  }

  void reset() override {
    rows_ = cols_ = symbols_ = identity_permutation(n_);
    started_ = false;
    done_ = n_ == 0;
  }

 private:
  std::size_t n_;
  std::vector<std::uint8_t> rows_, cols_, symbols_;
  bool started_ = false;
  bool done_ = false;
};

void fisher_yates(std::span<std::uint8_t> xs, std::mt19937_64& rng) {
  for (std::size_t k = xs.size(); k > 1; --k) {
    std::uniform_int_distribution<std::size_t> pick(0, k - 1);
    std::swap(xs[k - 1], xs[pick(rng)]);
  }
}

class RcbSampler final : public AssignmentStream {
 public:
  RcbSampler(std::size_t blocks, std::size_t treatments, std::uint64_t count,
             std::uint64_t seed)
      : blocks_(blocks), treatments_(treatments), count_(count), seed_(seed), rng_(seed) {}

  std::optional<Assignment> next() override {
    if (emitted_ >= count_) return std::nullopt;
    ++emitted_;
    std::vector<std::uint8_t> labels;
    labels.reserve(blocks_ * treatments_);
    for (std::size_t b = 0; b < blocks_; ++b) {
      auto p = identity_permutation(treatments_);
      fisher_yates(p, rng_);
      labels.insert(labels.end(), p.begin(), p.end());
    }
    return Assignment(Design::Rcb, blocks_, treatments_, std::move(labels),
                      Assignment::Unchecked{});
  }

  void reset() override {
    rng_.seed(seed_);
    emitted_ = 0;
  }

 private:
  std::size_t blocks_;
  std::size_t treatments_;
  std::uint64_t count_;
  std::uint64_t seed_;
  std::mt19937_64 rng_;
  std::uint64_t emitted_ = 0;
};

/// Jacobson-Matthews walk on the incidence cube of a Latin square. A
/// proper state has a 0/1 cube; an improper one has exactly one -1 cell.
class JacobsonMatthewsChain {
 public:
  JacobsonMatthewsChain(std::size_t n, std::uint64_t seed) : n_(n), cube_(n * n * n, 0), rng_(seed) {
    for (std::size_t r = 0; r < n_; ++r) {
      for (std::size_t c = 0; c < n_; ++c) at(r, c, (r + c) % n_) = 1;
    }
  }

  void step() {
    if (n_ < 2) return;
    std::uniform_int_distribution<std::size_t> pick(0, n_ - 1);
    std::size_t r, c, s;
    do {
      r = pick(rng_);
      c = pick(rng_);
      s = pick(rng_);
    } while (at(r, c, s) != 0);

    std::size_t r2 = 0, c2 = 0, s2 = 0;
    for (std::size_t k = 0; k < n_; ++k) {
      if (at(k, c, s) == 1) r2 = k;
      if (at(r, k, s) == 1) c2 = k;
      if (at(r, c, k) == 1) s2 = k;
    }
    flip(r, c, s, r2, c2, s2);

    while (at(r2, c2, s2) == -1) {
      r = r2;
      c = c2;
      s = s2;
      r2 = choose_one_of_two([&](std::size_t k) { return at(k, c, s) == 1; });
      c2 = choose_one_of_two([&](std::size_t k) { return at(r, k, s) == 1; });
      s2 = choose_one_of_two([&](std::size_t k) { return at(r, c, k) == 1; });
      flip(r, c, s, r2, c2, s2);
    }
  }

  std::vector<std::uint8_t> square() const {
    std::vector<std::uint8_t> sq(n_ * n_);
    for (std::size_t r = 0; r < n_; ++r) {
      for (std::size_t c = 0; c < n_; ++c) {
        for (std::size_t s = 0; s < n_; ++s) {
          if (cube_[(r * n_ + c) * n_ + s] == 1) sq[r * n_ + c] = static_cast<std::uint8_t>(s);
        }
      }
    }
    return sq;
  }

 private:
  std::int8_t& at(std::size_t r, std::size_t c, std::size_t s) {
    return cube_[(r * n_ + c) * n_ + s];
  }

  void flip(std::size_t r, std::size_t c, std::size_t s, std::size_t r2, std::size_t c2,
            std::size_t s2) {
    ++at(r, c, s);
    ++at(r, c2, s2);
    ++at(r2, c, s2);
    ++at(r2, c2, s);
    --at(r, c, s2);
    --at(r, c2, s);
    --at(r2, c, s);
    --at(r2, c2, s2);
  }

  // In an improper state each line through the -1 cell holds exactly two 1s.
  template <typename Pred>
  std::size_t choose_one_of_two(Pred is_one) {
    std::size_t found[2] = {0, 0};
    std::size_t m = 0;
    for (std::size_t k = 0; k < n_ && m < 2; ++k) {
      if (is_one(k)) found[m++] = k;
    }
    std::bernoulli_distribution coin(0.5);
    return coin(rng_) ? found[1] : found[0];
  }

  std::size_t n_;
  std::vector<std::int8_t> cube_;
  std::mt19937_64 rng_;
};

class LatinSquareSampler final : public AssignmentStream {
 public:
  LatinSquareSampler(std::size_t order, std::uint64_t count, std::uint64_t seed,
                     std::uint64_t burn_in)
      : n_(order), count_(count), seed_(seed), burn_in_(burn_in), chain_(order, seed) {}

  std::optional<Assignment> next() override {
    if (emitted_ >= count_) return std::nullopt;
    ++emitted_;
    for (std::uint64_t k = 0; k < burn_in_; ++k) chain_.step();
    return Assignment(Design::Ls, n_, n_, chain_.square(), Assignment::Unchecked{});
  }

  void reset() override {
    chain_ = JacobsonMatthewsChain(n_, seed_);
    emitted_ = 0;
  }

 private:
  std::size_t n_;
  std::uint64_t count_;
  std::uint64_t seed_;
  std::uint64_t burn_in_;
  JacobsonMatthewsChain chain_;
  std::uint64_t emitted_ = 0;
};

class IsotopySampler final : public AssignmentStream {
 public:
  IsotopySampler(std::size_t order, std::uint64_t count, std::uint64_t seed)
      : n_(order), count_(count), seed_(seed), rng_(seed) {}

  std::optional<Assignment> next() override {
    if (emitted_ >= count_) return std::nullopt;
    ++emitted_;
    auto rows = identity_permutation(n_);
    auto cols = identity_permutation(n_);
    auto symbols = identity_permutation(n_);
    fisher_yates(rows, rng_);
    fisher_yates(cols, rng_);
    fisher_yates(symbols, rng_);
    return Assignment(Design::Ls, n_, n_, relabel_cyclic(rows, cols, symbols),
                      Assignment::Unchecked{});
  }

  void reset() override {
    rng_.seed(seed_);
    emitted_ = 0;
  }

 private:
  std::size_t n_;
  std::uint64_t count_;
  std::uint64_t seed_;
  std::mt19937_64 rng_;
  std::uint64_t emitted_ = 0;
};

void require_order(std::size_t order) {
  if (order == 0 || order > 32) {
    throw Error(ErrorCode::InvalidArgument, "Latin square order must be in 1..32");
  }
}

}  // namespace

std::unique_ptr<AssignmentStream> enumerate_rcb(std::size_t num_blocks, std::size_t treatments,
                                                std::uint64_t cap) {
  if (num_blocks == 0 || treatments == 0 || treatments > 256) {
    throw Error(ErrorCode::InvalidArgument, "need at least one block and 1..256 treatments");
  }
  require_within_cap(rcb_space_size(num_blocks, treatments), cap, "the block design");
  return std::make_unique<RcbEnumerator>(num_blocks, treatments);
}

std::unique_ptr<AssignmentStream> enumerate_latin_squares(std::size_t order, std::uint64_t cap) {
  require_order(order);
  require_within_cap(latin_square_count(order), cap,
                     "the set of Latin squares of order " + std::to_string(order));
  return std::make_unique<LatinSquareEnumerator>(order);
}

std::unique_ptr<AssignmentStream> enumerate_isotopy_class(std::size_t order, std::uint64_t cap) {
  require_order(order);
  require_within_cap(rcb_space_size(3, order), cap,
                     "the set of relabellings of the order-" + std::to_string(order) + " square");
  return std::make_unique<IsotopyEnumerator>(order);
}

std::unique_ptr<AssignmentStream> sample_rcb(std::size_t num_blocks, std::size_t treatments,
                                             std::uint64_t count, std::uint64_t seed) {
  if (num_blocks == 0 || treatments == 0 || treatments > 256) {
    throw Error(ErrorCode::InvalidArgument, "need at least one block and 1..256 treatments");
  }
  return std::make_unique<RcbSampler>(num_blocks, treatments, count, seed);
}

std::unique_ptr<AssignmentStream> sample_latin_squares(std::size_t order, std::uint64_t count,
                                                       std::uint64_t seed,
                                                       std::optional<std::uint64_t> burn_in) {
  require_order(order);
  const std::uint64_t moves = burn_in.value_or(2 * order * order * order);
  return std::make_unique<LatinSquareSampler>(order, count, seed, moves);
}

std::unique_ptr<AssignmentStream> sample_isotopy_class(std::size_t order, std::uint64_t count,
                                                       std::uint64_t seed) {
  require_order(order);
  return std::make_unique<IsotopySampler>(order, count, seed);
}

std::unique_ptr<AssignmentStream> open_stream(Design design, std::size_t rows,
                                              std::size_t treatments,
                                              const RandomizationSpace& space) {
  if (design == Design::Ls && rows != treatments) {
    throw Error(ErrorCode::InvalidArgument, "a Latin square space needs rows == treatments");
  }
  const bool exact = space.kind == SpaceKind::ExactEnumeration;
  if (design == Design::Rcb) {
    return exact ? enumerate_rcb(rows, treatments, space.enumeration_cap)
                 : sample_rcb(rows, treatments, space.sample_size, space.seed);
  }
  if (space.measure == LatinMeasure::Isotopy) {
    return exact ? enumerate_isotopy_class(treatments, space.enumeration_cap)
                 : sample_isotopy_class(treatments, space.sample_size, space.seed);
  }
  return exact ? enumerate_latin_squares(treatments, space.enumeration_cap)
               : sample_latin_squares(treatments, space.sample_size, space.seed, space.burn_in);
}

std::uint64_t for_each_assignment(Design design, std::size_t rows, std::size_t treatments,
                                  const RandomizationSpace& space,
                                  const std::function<void(const Assignment&)>& fn) {
  auto stream = open_stream(design, rows, treatments, space);
  std::uint64_t n = 0;
  while (auto a = stream->next()) {
#ifndef NDEBUG
    if (!a->is_valid()) throw Error(ErrorCode::InvalidArgument, "stream emitted an invalid assignment");
#endif
    fn(*a);
    ++n;
  }
  return n;
}

}  // namespace randinf
