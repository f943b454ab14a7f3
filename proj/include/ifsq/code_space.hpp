#pragma once

// Finite words over {1..N}, infinite codes at finite precision, the order on
// codes, word masses and finite maximal antichains.

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstddef>
#include <deque>
#include <span>
#include <string>
#include <vector>

#include "ifsq/error.hpp"

namespace ifsq {

inline constexpr double kProbabilityTolerance = 1e-12;

/// Throws invalid-input unless `probs` is strictly positive and sums to 1.
inline void validate_probability_vector(std::span<const double> probs) {
  detail::require_input(probs.size() >= 2, "probability vector needs at least 2 entries");
  double total = 0.0;
  for (double p : probs) {
    detail::require_input(std::isfinite(p) && p > 0.0, "probabilities must be strictly positive");
    total += p;
  }
  detail::require_input(std::abs(total - 1.0) <= kProbabilityTolerance,
                        "probabilities must sum to 1 (got " + std::to_string(total) + ")");
}

class Word {
 public:
  Word() = default;

  explicit Word(int alphabet_size, std::vector<int> symbols = {})
      : alphabet_size_(alphabet_size), symbols_(std::move(symbols)) {
    detail::require_input(alphabet_size_ >= 2, "alphabet size must be at least 2");
    for (int s : symbols_) {
      detail::require_input(s >= 1 && s <= alphabet_size_,
                            "symbol " + std::to_string(s) + " outside [1, " +
                                std::to_string(alphabet_size_) + "]");
    }
  }

  /// Parses "121" (single-digit symbols) or "1.12.3" (dot separated).
  static Word parse(int alphabet_size, const std::string& text) {
    std::vector<int> symbols;
    if (text.find('.') != std::string::npos) {
      std::size_t start = 0;
      while (start <= text.size()) {
        const std::size_t dot = std::min(text.find('.', start), text.size());
        const std::string token = text.substr(start, dot - start);
        detail::require_input(!token.empty(), "empty symbol in word '" + text + "'");
        symbols.push_back(std::stoi(token));
        start = dot + 1;
      }
    } else {
      for (char c : text) {
        detail::require_input(c >= '0' && c <= '9', "bad symbol character in '" + text + "'");
        symbols.push_back(c - '0');
      }
    }
    return Word(alphabet_size, std::move(symbols));
  }

  int alphabet_size() const noexcept { return alphabet_size_; }
  const std::vector<int>& symbols() const noexcept { return symbols_; }
  std::size_t size() const noexcept { return symbols_.size(); }
  bool empty() const noexcept { return symbols_.empty(); }
  int operator[](std::size_t i) const { return symbols_[i]; }

  /// The word with its last symbol removed.
  Word parent() const {
    detail::require_input(!symbols_.empty(), "the empty word has no parent");
    return Word(alphabet_size_, {symbols_.begin(), symbols_.end() - 1});
  }

  Word prefix(std::size_t m) const {
    m = std::min(m, symbols_.size());
    return Word(alphabet_size_, {symbols_.begin(), symbols_.begin() + static_cast<long>(m)});
  }

  Word child(int symbol) const {
    std::vector<int> s = symbols_;
    s.push_back(symbol);
    return Word(alphabet_size_, std::move(s));
  }

  Word concat(const Word& tail) const {
    detail::require_input(tail.alphabet_size_ == alphabet_size_, "alphabet mismatch");
    std::vector<int> s = symbols_;
    s.insert(s.end(), tail.symbols_.begin(), tail.symbols_.end());
    return Word(alphabet_size_, std::move(s));
  }

  bool is_prefix_of(const Word& other) const {
    return symbols_.size() <= other.symbols_.size() &&
           std::equal(symbols_.begin(), symbols_.end(), other.symbols_.begin());
  }

  std::string to_string() const {
    std::string out;
    const bool dotted = alphabet_size_ > 9;
    for (std::size_t i = 0; i < symbols_.size(); ++i) {
      if (dotted && i > 0) out += '.';
      out += std::to_string(symbols_[i]);
    }
    return out;
  }

  friend bool operator==(const Word&, const Word&) = default;
  friend auto operator<=>(const Word& a, const Word& b) {
    if (auto c = a.symbols_.size() <=> b.symbols_.size(); c != 0) return c;
    return a.symbols_ <=> b.symbols_;
  }

 private:
  int alphabet_size_ = 2;
  std::vector<int> symbols_;
};

/// Every word of length `length` over {1..N}, lexicographic.
inline std::vector<Word> all_words(int alphabet_size, std::size_t length) {
  std::vector<Word> out{Word(alphabet_size)};
  for (std::size_t k = 0; k < length; ++k) {
    std::vector<Word> next;
    next.reserve(out.size() * static_cast<std::size_t>(alphabet_size));
    for (const Word& w : out) {
      for (int s = 1; s <= alphabet_size; ++s) next.push_back(w.child(s));
    }
    out = std::move(next);
  }
  return out;
}

enum class TailConvention { repeat_last, repeat_min, repeat_max };

/// An infinite code held as a finite word followed by a constant tail.
struct CodePrefix {
  Word word;
  TailConvention tail = TailConvention::repeat_last;

  std::size_t depth() const noexcept { return word.size(); }

  /// The symbol repeated forever after the word.
  int tail_symbol() const {
    switch (tail) {
      case TailConvention::repeat_last:
        return word.empty() ? 1 : word.symbols().back();
      case TailConvention::repeat_min:
        return 1;
      case TailConvention::repeat_max:
        return word.alphabet_size();
    }
    return 1;
  }

  /// Symbol k (0-based) of the represented infinite code.
  int symbol_at(std::size_t k) const { return k < word.size() ? word[k] : tail_symbol(); }

  std::vector<int> expand(std::size_t depth) const {
    std::vector<int> out(depth);
    for (std::size_t k = 0; k < depth; ++k) out[k] = symbol_at(k);
    return out;
  }
};

enum class CodeOrdering { less, equal_to_depth, greater };

struct CodeComparison {
  CodeOrdering ordering;
  /// 1-based index of the first differing symbol, or the depth compared to
  /// when no symbol differs.
  std::size_t certified_depth;
};

/// Compares two codes in the first-differing-symbol order. Tails are constant
/// after each word, so comparing one symbol past the longer word decides the
/// order of the represented infinite codes exactly.
inline CodeComparison compare_codes(const CodePrefix& a, const CodePrefix& b) {
  detail::require_input(a.word.alphabet_size() == b.word.alphabet_size(),
                        "codes over different alphabets");
  const std::size_t depth = std::max(a.depth(), b.depth()) + 1;
  for (std::size_t k = 0; k < depth; ++k) {
    const int x = a.symbol_at(k);
    const int y = b.symbol_at(k);
    if (x != y) return {x < y ? CodeOrdering::less : CodeOrdering::greater, k + 1};
  }
  return {CodeOrdering::equal_to_depth, depth};
}

/// p_w = product of probs over the symbols of w; the empty word has mass 1.
inline double word_probability(const Word& w, std::span<const double> probs) {
  validate_probability_vector(probs);
  detail::require_input(static_cast<std::size_t>(w.alphabet_size()) == probs.size(),
                        "probability vector length differs from alphabet size");
  double mass = 1.0;
  for (int s : w.symbols()) mass *= probs[static_cast<std::size_t>(s - 1)];
  return mass;
}

/// Product of per-symbol values over a word (contraction ratios etc.).
inline double word_product(const Word& w, std::span<const double> values) {
  double out = 1.0;
  for (int s : w.symbols()) out *= values[static_cast<std::size_t>(s - 1)];
  return out;
}

struct Antichain {
  std::vector<Word> words;
  int alphabet_size = 2;
};

inline constexpr std::size_t kDefaultAntichainBudget = 10'000'000;

/// { w : p_{w^-} >= epsilon > p_w }, listed in breadth-first order with
/// children 1..N. A node whose mass equals epsilon is expanded.
inline Antichain gamma_antichain(std::span<const double> probs, double epsilon,
                                 std::size_t budget = kDefaultAntichainBudget) {
  validate_probability_vector(probs);
  const double pmin = *std::min_element(probs.begin(), probs.end());
  detail::require_input(epsilon > 0.0 && epsilon <= pmin,
                        "epsilon must lie in (0, min(probs)]");
  const int n = static_cast<int>(probs.size());

  Antichain out{{}, n};
  struct Node {
    Word word;
    double mass;
  };
  std::deque<Node> queue;
  queue.push_back({Word(n), 1.0});
  while (!queue.empty()) {
    Node node = std::move(queue.front());
    queue.pop_front();
    for (int s = 1; s <= n; ++s) {
      const double mass = node.mass * probs[static_cast<std::size_t>(s - 1)];
      if (mass < epsilon) {
        out.words.push_back(node.word.child(s));
      } else {
        queue.push_back({node.word.child(s), mass});
      }
      detail::require(out.words.size() + queue.size() <= budget, ErrorKind::resource,
                       "antichain enumeration exceeded budget of " + std::to_string(budget));
    }
  }
  return out;
}

namespace detail {

// True iff the words (all extending `depth` common symbols) cover every
// infinite continuation exactly once.
inline bool covers_exactly(std::span<const Word* const> words, std::size_t depth, int n) {
  if (words.empty()) return false;
  for (const Word* w : words) {
    if (w->size() == depth) return words.size() == 1;
  }
  for (int s = 1; s <= n; ++s) {
    std::vector<const Word*> branch;
    for (const Word* w : words) {
      if ((*w)[depth] == s) branch.push_back(w);
    }
    if (!covers_exactly(branch, depth + 1, n)) return false;
  }
  return true;
}

}  // namespace detail

/// True iff the set is prefix-free and every infinite code has a prefix in it.
inline bool is_maximal_antichain(const Antichain& g) {
  std::vector<const Word*> ptrs;
  ptrs.reserve(g.words.size());
  for (const Word& w : g.words) {
    if (w.alphabet_size() != g.alphabet_size) return false;
    ptrs.push_back(&w);
  }
  return detail::covers_exactly(ptrs, 0, g.alphabet_size);
}

}  // namespace ifsq
