#pragma once

// Core sequence types and arithmetic-progression subsequence detection.
//
// A k-term AP subsequence of a sequence s is a set of positions
// p1 < p2 < ... < pk whose values, read in position order, form an
// arithmetic progression v, v+d, ..., v+(k-1)d with d != 0.  d may be
// negative (decreasing progressions count), and "odd common difference"
// always refers to the parity of |d|.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

namespace apfree {

using Value = std::int64_t;

// ---------------------------------------------------------------------------
// Errors

struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Invalid input values (duplicates, non-positive, malformed prefixes, ...).
struct domain_error : error {
    using error::error;
};

// A computed value would leave the exact 64-bit integer range.
struct arithmetic_range_error : error {
    using error::error;
};

// Input is structurally valid but too large for a desk-scale run.
struct feasibility_error : error {
    using error::error;
};

// Persistent data that cannot be parsed or fails its schema.
struct format_error : error {
    using error::error;
};

// An attempt to store a result that contradicts one already stored.
struct conflict_error : error {
    using error::error;
};

// The requested quantity is not defined for the given input.
struct not_applicable_error : error {
    using error::error;
};

// ---------------------------------------------------------------------------
// Checked 64-bit arithmetic.  Construction blocks grow geometrically, so
// overflow must surface as an error, never wrap.

inline Value checked_add(Value a, Value b) {
    Value r;
    if (__builtin_add_overflow(a, b, &r))
        throw arithmetic_range_error("integer overflow in addition");
    return r;
}

inline Value checked_sub(Value a, Value b) {
    Value r;
    if (__builtin_sub_overflow(a, b, &r))
        throw arithmetic_range_error("integer overflow in subtraction");
    return r;
}

inline Value checked_mul(Value a, Value b) {
    Value r;
    if (__builtin_mul_overflow(a, b, &r))
        throw arithmetic_range_error("integer overflow in multiplication");
    return r;
}

inline Value checked_pow(Value base, Value exp) {
    if (exp < 0) throw domain_error("checked_pow: negative exponent");
    Value r = 1;
    for (Value i = 0; i < exp; ++i) r = checked_mul(r, base);
    return r;
}

// ---------------------------------------------------------------------------
// Parity filter on the common difference.

enum class Parity { any, odd, even };

constexpr bool parity_matches(Parity p, Value diff) {
    switch (p) {
        case Parity::any: return true;
        case Parity::odd: return (diff & 1) != 0;
        case Parity::even: return (diff & 1) == 0;
    }
    return false;
}

inline std::string to_string(Parity p) {
    switch (p) {
        case Parity::any: return "any";
        case Parity::odd: return "odd";
        case Parity::even: return "even";
    }
    return "any";
}

inline Parity parse_parity(std::string_view s) {
    if (s == "any") return Parity::any;
    if (s == "odd") return Parity::odd;
    if (s == "even") return Parity::even;
    throw domain_error("unknown parity \"" + std::string(s) + "\" (expected any|odd|even)");
}

// ---------------------------------------------------------------------------
// Seq: a finite sequence of pairwise-distinct positive integers.
// Positions are 1-based throughout the public interface.

class Seq {
public:
    Seq() = default;

    explicit Seq(std::vector<Value> values) : values_(std::move(values)) {
        validate();
    }

    Seq(std::initializer_list<Value> values) : values_(values) { validate(); }

    // For construction paths that guarantee distinct positive values.
    static Seq unchecked(std::vector<Value> values) {
        Seq s;
        s.values_ = std::move(values);
        return s;
    }

    std::size_t size() const { return values_.size(); }
    bool empty() const { return values_.empty(); }
    const std::vector<Value>& values() const { return values_; }
    Value operator[](std::size_t i0) const { return values_[i0]; }

    Value at1(std::size_t pos) const {
        if (pos == 0 || pos > values_.size())
            throw domain_error("sequence position out of range");
        return values_[pos - 1];
    }

    auto begin() const { return values_.begin(); }
    auto end() const { return values_.end(); }

    friend bool operator==(const Seq&, const Seq&) = default;

    // True iff this is a permutation of {1..size()}.
    bool is_dense_permutation() const {
        for (Value v : values_)
            if (v > static_cast<Value>(values_.size())) return false;
        return true;  // distinct + positive + bounded by n
    }

    std::string to_text() const {
        std::string out;
        for (std::size_t i = 0; i < values_.size(); ++i) {
            if (i) out += ' ';
            out += std::to_string(values_[i]);
        }
        return out;
    }

private:
    void validate() const {
        std::unordered_set<Value> seen;
        seen.reserve(values_.size() * 2);
        for (Value v : values_) {
            if (v <= 0)
                throw domain_error("sequence values must be positive (got " + std::to_string(v) + ")");
            if (!seen.insert(v).second)
                throw domain_error("sequence values must be distinct (repeated " + std::to_string(v) + ")");
        }
    }

    std::vector<Value> values_;
};

// Whitespace-separated decimal integers.
inline Seq parse_seq(std::string_view text) {
    std::vector<Value> vals;
    std::istringstream in{std::string(text)};
    std::string tok;
    while (in >> tok) {
        try {
            std::size_t used = 0;
            long long v = std::stoll(tok, &used);
            if (used != tok.size()) throw std::invalid_argument(tok);
            vals.push_back(v);
        } catch (const std::exception&) {
            throw format_error("cannot parse \"" + tok + "\" as an integer");
        }
    }
    return Seq(std::move(vals));
}

// ---------------------------------------------------------------------------
// APConstraint: what to avoid — k terms, difference-parity filter.

struct APConstraint {
    int k = 3;
    Parity parity = Parity::any;

    APConstraint(int k_ = 3, Parity p = Parity::any) : k(k_), parity(p) {
        if (k < 3) throw domain_error("APConstraint requires k >= 3");
    }
};

// ---------------------------------------------------------------------------
// APWitness: a concrete AP subsequence found in a host sequence.

struct APWitness {
    std::vector<std::size_t> positions;  // 1-based, strictly increasing
    std::vector<Value> values;
    Value diff = 0;

    std::size_t length() const { return positions.size(); }

    // Re-checks every type invariant against the host values.
    void validate(std::span<const Value> host, Parity parity = Parity::any) const {
        if (positions.size() != values.size() || positions.empty())
            throw domain_error("witness: positions/values size mismatch");
        for (std::size_t i = 0; i < positions.size(); ++i) {
            if (i > 0 && positions[i] <= positions[i - 1])
                throw domain_error("witness: positions not strictly increasing");
            if (positions[i] == 0 || positions[i] > host.size())
                throw domain_error("witness: position out of host range");
            if (host[positions[i] - 1] != values[i])
                throw domain_error("witness: value does not match host sequence");
        }
        if (positions.size() >= 2) {
            if (diff == 0) throw domain_error("witness: zero common difference");
            for (std::size_t i = 1; i < values.size(); ++i)
                if (values[i] - values[i - 1] != diff)
                    throw domain_error("witness: values are not an arithmetic progression");
            if (!parity_matches(parity, diff))
                throw domain_error("witness: difference parity violates constraint");
        } else if (diff != 0) {
            throw domain_error("witness: singleton must carry zero diff");
        }
    }

    void validate(const Seq& host, Parity parity = Parity::any) const {
        validate(std::span<const Value>(host.values()), parity);
    }
};

// ---------------------------------------------------------------------------
// AffineMap: value t -> start + (t-1)*step.  APs are preserved in both
// directions, so AP-freeness transfers along the image.

struct AffineMap {
    Value start = 1;
    Value step = 1;

    AffineMap(Value start_, Value step_) : start(start_), step(step_) {
        if (step < 1) throw domain_error("AffineMap requires step >= 1");
    }

    Value apply(Value t) const {
        return checked_add(start, checked_mul(t - 1, step));
    }
};

namespace detail {

// Value -> 0-based position lookup.  Uses a dense table when the value range
// is compact, a hash map otherwise.
class ValueIndex {
public:
    explicit ValueIndex(std::span<const Value> values) : size_(values.size()) {
        if (values.empty()) return;
        auto [mn, mx] = std::minmax_element(values.begin(), values.end());
        min_ = *mn;
        const Value range = *mx - *mn + 1;
        const Value dense_cap =
            std::max<Value>(1024, 8 * static_cast<Value>(values.size()));
        if (range <= dense_cap) {
            dense_.assign(static_cast<std::size_t>(range), npos);
            for (std::size_t i = 0; i < values.size(); ++i)
                dense_[static_cast<std::size_t>(values[i] - min_)] = i;
        } else {
            sparse_.reserve(values.size() * 2);
            for (std::size_t i = 0; i < values.size(); ++i) sparse_.emplace(values[i], i);
        }
    }

    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

    std::size_t find(Value v) const {
        if (!dense_.empty() || sparse_.empty()) {
            if (dense_.empty()) return npos;
            if (v < min_ || v - min_ >= static_cast<Value>(dense_.size())) return npos;
            return dense_[static_cast<std::size_t>(v - min_)];
        }
        auto it = sparse_.find(v);
        return it == sparse_.end() ? npos : it->second;
    }

private:
    std::size_t size_ = 0;
    Value min_ = 0;
    std::vector<std::size_t> dense_;
    std::unordered_map<Value, std::size_t> sparse_;
};

// Walks the unique AP chain determined by the first two picks.  Values are
// distinct, so once (p1, p2) fix the difference every later term sits at a
// unique position; targets outside the 64-bit range cannot be present and
// simply end the chain.
inline bool walk_chain(std::span<const Value> vals, const ValueIndex& index,
                       std::size_t p1, std::size_t p2, int k,
                       std::vector<std::size_t>& out_positions) {
    const Value d = vals[p2] - vals[p1];
    out_positions.clear();
    out_positions.push_back(p1);
    out_positions.push_back(p2);
    __int128 cur = vals[p2];
    std::size_t cur_pos = p2;
    for (int t = 2; t < k; ++t) {
        cur += d;
        if (cur < std::numeric_limits<Value>::min() || cur > std::numeric_limits<Value>::max())
            return false;
        const std::size_t pos = index.find(static_cast<Value>(cur));
        if (pos == ValueIndex::npos || pos <= cur_pos) return false;
        out_positions.push_back(pos);
        cur_pos = pos;
    }
    return true;
}

// Lexicographically-smallest k-term witness, k >= 2.  Scanning first picks in
// ascending position order and following the forced chain yields the
// lex-smallest position tuple directly.
inline std::optional<APWitness> find_ap_impl(std::span<const Value> vals, int k, Parity parity) {
    const std::size_t n = vals.size();
    if (k < 2 || n < static_cast<std::size_t>(k)) return std::nullopt;
    const ValueIndex index(vals);
    std::vector<std::size_t> chain;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const Value d = vals[j] - vals[i];
            if (!parity_matches(parity, d)) continue;
            if (!walk_chain(vals, index, i, j, k, chain)) continue;
            APWitness w;
            w.diff = d;
            w.positions.reserve(chain.size());
            w.values.reserve(chain.size());
            for (std::size_t p : chain) {
                w.positions.push_back(p + 1);
                w.values.push_back(vals[p]);
            }
            return w;
        }
    }
    return std::nullopt;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// find_ap: the smallest witness of a k-term AP subsequence obeying the
// parity filter, or nullopt.  Tie-break: lexicographically smallest
// position tuple.

inline std::optional<APWitness> find_ap(std::span<const Value> values, const APConstraint& c) {
    return detail::find_ap_impl(values, c.k, c.parity);
}

inline std::optional<APWitness> find_ap(const Seq& seq, const APConstraint& c) {
    return find_ap(std::span<const Value>(seq.values()), c);
}

// ---------------------------------------------------------------------------
// longest_ap: maximum m such that an m-term AP subsequence with matching
// parity exists, plus one witness of that length (the lex-smallest).
//
// Length via the pair-indexed dynamic program: for each position j and each
// earlier i, the chain ending at j with difference d = v[j]-v[i] extends the
// chain ending at i with the same d.  Distinct values make the predecessor
// position unique, so each (j, d) entry is written once.

inline std::pair<std::size_t, std::optional<APWitness>> longest_ap(const Seq& seq,
                                                                   Parity parity = Parity::any) {
    const auto& vals = seq.values();
    const std::size_t n = vals.size();
    if (n == 0) return {0, std::nullopt};

    std::size_t best = 1;
    std::vector<std::unordered_map<Value, std::size_t>> chain_len(n);
    for (std::size_t j = 1; j < n; ++j) {
        chain_len[j].reserve(j);
        for (std::size_t i = 0; i < j; ++i) {
            const Value d = vals[j] - vals[i];
            if (!parity_matches(parity, d)) continue;
            std::size_t len = 2;
            if (auto it = chain_len[i].find(d); it != chain_len[i].end()) len = it->second + 1;
            chain_len[j][d] = len;
            best = std::max(best, len);
        }
    }

    if (best < 2) {
        APWitness w;
        w.positions = {1};
        w.values = {vals[0]};
        w.diff = 0;
        return {1, w};
    }
    auto witness = detail::find_ap_impl(std::span<const Value>(vals), static_cast<int>(best), parity);
    return {best, witness};
}

// ---------------------------------------------------------------------------
// canonical_apfree_perm: deterministic 3AP-free permutation of {1..n}.
//
// Doubling construction: a 3AP-free arrangement of the even values followed
// by one of the odd values stays 3AP-free, because the first and third terms
// of any 3AP share parity and each parity class carries an affine copy of a
// smaller instance.  Base cases (1), (1,2), (1,3,2); above that
//   f(n) = 2*f(floor(n/2)) ++ (2*f(ceil(n/2)) - 1).

inline Seq canonical_apfree_perm(Value n) {
    if (n < 1) throw domain_error("canonical_apfree_perm requires n >= 1");
    if (n == 1) return Seq::unchecked({1});
    if (n == 2) return Seq::unchecked({1, 2});
    if (n == 3) return Seq::unchecked({1, 3, 2});
    const Seq lo = canonical_apfree_perm(n / 2);
    const Seq hi = (n % 2 == 0) ? lo : canonical_apfree_perm(n / 2 + 1);
    std::vector<Value> out;
    out.reserve(static_cast<std::size_t>(n));
    for (Value v : lo) out.push_back(2 * v);
    for (Value v : hi) out.push_back(2 * v - 1);
    return Seq::unchecked(std::move(out));
}

// ---------------------------------------------------------------------------
// affine_image: map a permutation of {1..m} onto the arithmetic set
// {start, start+step, ..., start+(m-1)*step} in the same order.

inline Seq affine_image(const Seq& perm, const AffineMap& map) {
    if (!perm.is_dense_permutation())
        throw domain_error("affine_image requires a permutation of {1..m}");
    std::vector<Value> out;
    out.reserve(perm.size());
    for (Value t : perm) out.push_back(map.apply(t));
    return Seq(std::move(out));  // re-validates positivity
}

// ---------------------------------------------------------------------------
// Symmetries.  Reversal maps APs to APs (difference negated); complement
// v -> n+1-v does the same on permutations of {1..n}.

inline Seq reverse_seq(const Seq& seq) {
    std::vector<Value> out(seq.values().rbegin(), seq.values().rend());
    return Seq::unchecked(std::move(out));
}

inline Seq complement_perm(const Seq& seq) {
    if (!seq.is_dense_permutation())
        throw domain_error("complement requires a permutation of {1..n}");
    const Value n = static_cast<Value>(seq.size());
    std::vector<Value> out;
    out.reserve(seq.size());
    for (Value v : seq) out.push_back(n + 1 - v);
    return Seq::unchecked(std::move(out));
}

}  // namespace apfree
