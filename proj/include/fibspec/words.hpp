#pragma once

// Fibonacci substitution words, windows of the special hull element and the
// combinatorics (factor complexity, square prefixes, conjugates) used by the
// spectral routines.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include "fibspec/error.hpp"

namespace fibspec {

enum class Letter : std::uint8_t { A = 0, B = 1 };

inline char to_char(Letter l) { return l == Letter::A ? 'a' : 'b'; }

/// Finite word over {a, b}, one byte per letter.
class Word {
public:
    Word() = default;
    explicit Word(std::vector<Letter> letters) : letters_(std::move(letters)) {}

    static Word from_string(std::string_view s) {
        std::vector<Letter> out;
        out.reserve(s.size());
        for (char c : s) {
            if (c == 'a' || c == 'A')
                out.push_back(Letter::A);
            else if (c == 'b' || c == 'B')
                out.push_back(Letter::B);
            else
                throw Error(ErrorKind::InvalidArgument, std::string("not a letter: ") + c);
        }
        return Word(std::move(out));
    }

    std::string str() const {
        std::string s;
        s.reserve(letters_.size());
        for (Letter l : letters_) s.push_back(to_char(l));
        return s;
    }

    std::size_t size() const noexcept { return letters_.size(); }
    bool empty() const noexcept { return letters_.empty(); }
    Letter operator[](std::size_t i) const { return letters_[i]; }
    const std::vector<Letter>& letters() const noexcept { return letters_; }

    auto begin() const noexcept { return letters_.begin(); }
    auto end() const noexcept { return letters_.end(); }

    Word slice(std::size_t pos, std::size_t len) const {
        return Word(std::vector<Letter>(letters_.begin() + static_cast<std::ptrdiff_t>(pos),
                                        letters_.begin() + static_cast<std::ptrdiff_t>(pos + len)));
    }

    Word rotated(std::size_t shift) const {
        std::vector<Letter> out(letters_);
        if (!out.empty()) std::rotate(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(shift % out.size()), out.end());
        return Word(std::move(out));
    }

    friend Word operator+(const Word& lhs, const Word& rhs) {
        std::vector<Letter> out;
        out.reserve(lhs.size() + rhs.size());
        out.insert(out.end(), lhs.letters_.begin(), lhs.letters_.end());
        out.insert(out.end(), rhs.letters_.begin(), rhs.letters_.end());
        return Word(std::move(out));
    }

    friend bool operator==(const Word&, const Word&) = default;
    friend auto operator<=>(const Word&, const Word&) = default;

private:
    std::vector<Letter> letters_;
};

/// Longest word the generators will materialize.
inline constexpr std::uint64_t max_word_length = std::uint64_t{1} << 30;

/// F_k with F_0 = F_1 = 1. Throws Overflow past the 64-bit range (k > 91).
inline std::uint64_t fibonacci(int k) {
    detail::require(k >= 0, ErrorKind::InvalidArgument, "fibonacci index must be >= 0");
    std::uint64_t prev = 1, cur = 1;
    for (int i = 1; i < k; ++i) {
        if (cur > std::numeric_limits<std::uint64_t>::max() - prev)
            throw Error(ErrorKind::Overflow, "F_" + std::to_string(k) + " exceeds 64 bits");
        std::uint64_t next = prev + cur;
        prev = cur;
        cur = next;
    }
    return cur;
}

/// Image under S(a) = ab, S(b) = a.
inline Word substitute(const Word& w) {
    std::vector<Letter> out;
    out.reserve(w.size() * 2);
    for (Letter l : w) {
        out.push_back(Letter::A);
        if (l == Letter::A) out.push_back(Letter::B);
    }
    return Word(std::move(out));
}

/// S^n(w).
inline Word substitute_power(Word w, int n) {
    for (int i = 0; i < n; ++i) w = substitute(w);
    return w;
}

/// s_k: the prefix of the Fibonacci word u of length F_k (s_1 = a, s_2 = ab,
/// s_{k+1} = s_k s_{k-1}). Equals S^{k-1}(a).
inline Word fib_prefix(int k) {
    detail::require(k >= 1, ErrorKind::InvalidArgument, "fib_prefix requires k >= 1");
    if (fibonacci(k) > max_word_length)
        throw Error(ErrorKind::Overflow, "prefix length F_" + std::to_string(k) + " too large");
    Word prev = Word::from_string("a");
    if (k == 1) return prev;
    Word cur = Word::from_string("ab");
    for (int i = 2; i < k; ++i) {
        Word next = cur + prev;
        prev = std::move(cur);
        cur = std::move(next);
    }
    return cur;
}

/// Smallest k >= 1 with F_k >= len.
inline int fib_index_covering(std::uint64_t len) {
    int k = 1;
    while (fibonacci(k) < len) ++k;
    return k;
}

/// Letters of a two-sided sequence on positions lo..hi.
struct SignedWindow {
    long long lo = 1;
    Word letters;

    long long hi() const { return lo + static_cast<long long>(letters.size()) - 1; }
    bool covers(long long from, long long to) const { return from >= lo && to <= hi(); }
    Letter at(long long n) const { return letters[static_cast<std::size_t>(n - lo)]; }
};

/// Window of the special element omega_s: right of the origin it equals u,
/// positions n <= 0 carry the suffix of S^{2m}(b) ending at the origin.
inline SignedWindow omega_s(long long lo, long long hi) {
    detail::require(lo <= hi, ErrorKind::InvalidArgument, "omega_s requires lo <= hi");
    const auto width = static_cast<unsigned long long>(hi - lo) + 1;
    detail::require(width <= max_word_length, ErrorKind::Overflow, "omega_s window too large");

    std::vector<Letter> out;
    out.reserve(width);
    if (lo <= 0) {
        // S^{2m}(b) = S^{2m-1}(a) = s_{2m}; each is a suffix of the next.
        const auto need = static_cast<std::uint64_t>(1 - lo);
        int k = 2;
        while (fibonacci(k) < need) k += 2;
        const Word left = fib_prefix(k);
        const long long top = std::min<long long>(hi, 0);
        for (long long n = lo; n <= top; ++n)
            out.push_back(left[static_cast<std::size_t>(static_cast<long long>(left.size()) - 1 + n)]);
    }
    if (hi >= 1) {
        const Word right = fib_prefix(fib_index_covering(static_cast<std::uint64_t>(hi)));
        for (long long n = std::max<long long>(lo, 1); n <= hi; ++n)
            out.push_back(right[static_cast<std::size_t>(n - 1)]);
    }
    return SignedWindow{lo, Word(std::move(out))};
}

/// Restriction to n >= 1 of the shifted hull element (T^shift omega_s), i.e.
/// the letters u_{shift+1} ... u_{shift+len} placed at positions 1..len.
inline SignedWindow shifted_window(std::size_t shift, std::size_t len) {
    const auto w = omega_s(static_cast<long long>(shift) + 1, static_cast<long long>(shift + len));
    return SignedWindow{1, w.letters};
}

/// Minimal substitution depth whose factor set of length L is complete.
inline int subword_depth(std::size_t L) {
    return fib_index_covering(L + 1) + 1;
}

/// All length-L factors of S^depth(a), sorted. Raises InsufficientDepth when
/// F_{depth-1} < L + 1, below which the factor set is not guaranteed complete.
inline std::vector<Word> subwords(std::size_t L, int depth) {
    detail::require(L >= 1 && depth >= 1, ErrorKind::InvalidArgument, "subwords requires L >= 1, depth >= 1");
    if (depth < 2 || fibonacci(depth - 1) < L + 1)
        throw Error(ErrorKind::InsufficientDepth,
                    "depth " + std::to_string(depth) + " too shallow for L = " + std::to_string(L) +
                        " (need " + std::to_string(subword_depth(L)) + ")");
    const Word w = fib_prefix(depth + 1);
    std::vector<Word> out;
    for (std::size_t i = 0; i + L <= w.size(); ++i) out.push_back(w.slice(i, L));
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

inline std::vector<Word> subwords(std::size_t L) { return subwords(L, subword_depth(L)); }

/// The |S^k(a)| rotations of S^k(a), starting with S^k(a) itself.
inline std::vector<Word> cyclic_conjugates(int k) {
    detail::require(k >= 0, ErrorKind::InvalidArgument, "cyclic_conjugates requires k >= 0");
    const Word base = fib_prefix(k + 1);
    std::vector<Word> out;
    out.reserve(base.size());
    for (std::size_t r = 0; r < base.size(); ++r) out.push_back(base.rotated(r));
    std::vector<Word> sorted(out);
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
        throw Error(ErrorKind::Precondition, "S^k(a) has coinciding rotations");
    return out;
}

/// True iff positions 1..2n of the window read x x with x a rotation of
/// S^k(a), n = |S^k(a)|. The window must cover 1..2n.
inline bool square_prefix_check(const SignedWindow& w, int k) {
    detail::require(k >= 0, ErrorKind::InvalidArgument, "square_prefix_check requires k >= 0");
    const Word base = fib_prefix(k + 1);
    const auto n = static_cast<long long>(base.size());
    if (!w.covers(1, 2 * n))
        throw Error(ErrorKind::WindowTooShort, "square check at k = " + std::to_string(k) + " needs positions 1.." +
                                                   std::to_string(2 * n));
    for (long long i = 1; i <= n; ++i)
        if (w.at(i) != w.at(i + n)) return false;
    const Word block = w.letters.slice(static_cast<std::size_t>(1 - w.lo), static_cast<std::size_t>(n));
    for (std::size_t r = 0; r < base.size(); ++r)
        if (base.rotated(r) == block) return true;
    return false;
}

} // namespace fibspec
