#pragma once

// Infinite AP-avoiding constructions as lazy block streams, plus the two
// streaming witness-finding procedures.
//
// Three block families, each concatenated in order and emitted through a
// 3AP-free permutation of each block:
//   theorem2    sigma_1 pi_1 sigma_2 pi_2 ...  (evens/odds, avoids odd-
//               difference 3APs; a permutation of the positive integers)
//   fourfree(a) S_i = [a^(2i), a^(2i+1)]       (4AP-free set, upper density
//               a/(a+1))
//   threefree   T_k = [p_k, q_k], p_0=1, q_0=2, p_k = 2q_{k-1},
//               q_k = 3q_{k-1} - 1               (3AP-free set)
//
// Block cardinalities for theorem2 are |sigma_i| = 4^i/2 and |pi_i| =
// 4^(i-1) with pi_i ending at (4^(i+1)-10)/6 — the unique choice making
// consecutive blocks tile the evens and odds.

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "apfree/core.hpp"

namespace apfree {

enum class StreamKind { theorem2, fourfree, threefree };

inline std::string to_string(StreamKind k) {
    switch (k) {
        case StreamKind::theorem2: return "theorem2";
        case StreamKind::fourfree: return "fourfree";
        case StreamKind::threefree: return "threefree";
    }
    return "?";
}

inline StreamKind parse_stream_kind(const std::string& text) {
    if (text == "theorem2") return StreamKind::theorem2;
    if (text == "fourfree") return StreamKind::fourfree;
    if (text == "threefree") return StreamKind::threefree;
    throw format_error("unknown stream kind '" + text + "'");
}

// Any 3AP-free permutation source works; blocks only need per-block
// 3AP-freeness.  Default is canonical_apfree_perm.
using PermSource = std::function<Seq(Value)>;

struct BlockStreamSpec {
    StreamKind kind = StreamKind::theorem2;
    Value a = 2;        // fourfree base
    PermSource source;  // empty -> canonical_apfree_perm

    static BlockStreamSpec theorem2(PermSource src = {}) {
        return BlockStreamSpec{StreamKind::theorem2, 2, std::move(src)};
    }
    static BlockStreamSpec fourfree(Value a, PermSource src = {}) {
        if (a < 2) throw domain_error("fourfree requires a >= 2");
        return BlockStreamSpec{StreamKind::fourfree, a, std::move(src)};
    }
    static BlockStreamSpec threefree(PermSource src = {}) {
        return BlockStreamSpec{StreamKind::threefree, 2, std::move(src)};
    }

    Seq order_for(Value count) const {
        Seq order = source ? source(count) : canonical_apfree_perm(count);
        if (static_cast<Value>(order.size()) != count || !order.is_dense_permutation())
            throw domain_error("block permutation source must return a permutation of {1.." +
                               std::to_string(count) + "}");
        return order;
    }
};

// ---------------------------------------------------------------------------
// Block shapes: extents alone, cheap at any index; used for closed-form
// density sums and separation checks without materializing orders.

struct BlockShape {
    Value start = 0;
    Value step = 1;
    Value count = 0;
    std::string label;

    Value last() const { return checked_add(start, checked_mul(step, count - 1)); }
};

inline BlockShape theorem2_sigma_shape(Value i) {
    if (i < 1) throw domain_error("theorem2 blocks require i >= 1");
    const Value pow4 = checked_pow(4, i);
    return {(pow4 + 2) / 3, 2, pow4 / 2, "sigma_" + std::to_string(i)};
}

inline BlockShape theorem2_pi_shape(Value i) {
    if (i < 1) throw domain_error("theorem2 blocks require i >= 1");
    const Value pow4 = checked_pow(4, i);
    return {(pow4 + 2) / 6, 2, pow4 / 4, "pi_" + std::to_string(i)};
}

inline BlockShape fourfree_shape(Value a, Value i) {
    if (a < 2) throw domain_error("fourfree requires a >= 2");
    if (i < 0) throw domain_error("fourfree blocks require i >= 0");
    const Value lo = checked_pow(a, 2 * i);
    const Value hi = checked_mul(lo, a);
    return {lo, 1, hi - lo + 1, "S_" + std::to_string(i)};
}

// (p_k, q_k) endpoints of the k-th threefree block.
inline std::pair<Value, Value> threefree_bounds(Value k) {
    if (k < 0) throw domain_error("threefree blocks require k >= 0");
    Value p = 1, q = 2;
    for (Value j = 1; j <= k; ++j) {
        p = checked_mul(2, q);
        q = checked_sub(checked_mul(3, q), 1);
    }
    return {p, q};
}

inline BlockShape threefree_shape(Value k) {
    const auto [p, q] = threefree_bounds(k);
    return {p, 1, q - p + 1, "T_" + std::to_string(k)};
}

// ---------------------------------------------------------------------------
// Materialized blocks.

struct Block {
    Value start = 0;
    Value step = 1;
    Value count = 0;
    Seq order;  // 3AP-free permutation of {1..count}
    std::string label;

    Value min() const { return start; }
    Value max() const { return checked_add(start, checked_mul(step, count - 1)); }
    Seq emit() const { return affine_image(order, AffineMap{start, step}); }
};

inline Block make_block(const BlockShape& shape, const BlockStreamSpec& spec) {
    (void)shape.last();  // block must fit in 64-bit values
    return Block{shape.start, shape.step, shape.count, spec.order_for(shape.count), shape.label};
}

inline std::pair<Block, Block> theorem2_blocks(Value i, const BlockStreamSpec& spec = BlockStreamSpec::theorem2()) {
    return {make_block(theorem2_sigma_shape(i), spec), make_block(theorem2_pi_shape(i), spec)};
}

inline Block fourfree_blocks(Value a, Value i, const BlockStreamSpec& spec = {}) {
    BlockStreamSpec s = spec;
    s.kind = StreamKind::fourfree;
    s.a = a;
    return make_block(fourfree_shape(a, i), s);
}

inline Block threefree_blocks(Value k, const BlockStreamSpec& spec = BlockStreamSpec::threefree()) {
    return make_block(threefree_shape(k), spec);
}

// The m-th block in emission order (0-based).
inline BlockShape stream_block_shape(const BlockStreamSpec& spec, std::size_t ordinal) {
    switch (spec.kind) {
        case StreamKind::theorem2: {
            const Value i = static_cast<Value>(ordinal / 2) + 1;
            return (ordinal % 2 == 0) ? theorem2_sigma_shape(i) : theorem2_pi_shape(i);
        }
        case StreamKind::fourfree:
            return fourfree_shape(spec.a, static_cast<Value>(ordinal));
        case StreamKind::threefree:
            return threefree_shape(static_cast<Value>(ordinal));
    }
    throw domain_error("invalid stream kind");
}

// ---------------------------------------------------------------------------
// StreamCursor: lazily concatenates blocks.  Restartable pure generator —
// rebuilding a cursor from the same spec replays the identical stream.

class StreamCursor {
public:
    explicit StreamCursor(BlockStreamSpec spec) : spec_(std::move(spec)) {}

    const BlockStreamSpec& spec() const { return spec_; }
    std::uint64_t emitted() const { return emitted_; }

    // True when next() will emit the first value of a fresh block.
    bool at_block_start() {
        ensure_block();
        return intra_ == 0;
    }

    const Block& current_block() {
        ensure_block();
        return *block_;
    }

    Value next() {
        ensure_block();
        ++emitted_;
        return values_[intra_++];
    }

    Seq next_n(std::size_t n) {
        std::vector<Value> out;
        out.reserve(n);
        while (out.size() < n) out.push_back(next());
        return Seq(std::move(out));
    }

private:
    void ensure_block() {
        if (block_ && intra_ < values_.size()) return;
        const std::size_t ordinal = block_ ? ordinal_ + 1 : 0;
        Block blk = make_block(stream_block_shape(spec_, ordinal), spec_);
        values_ = blk.emit().values();
        block_ = std::move(blk);
        ordinal_ = ordinal;
        intra_ = 0;
    }

    BlockStreamSpec spec_;
    std::optional<Block> block_;
    std::size_t ordinal_ = 0;
    std::vector<Value> values_;
    std::size_t intra_ = 0;
    std::uint64_t emitted_ = 0;
};

inline StreamCursor stream(BlockStreamSpec spec) { return StreamCursor(std::move(spec)); }

inline Seq next_n(StreamCursor& cursor, std::size_t n) { return cursor.next_n(n); }

// ---------------------------------------------------------------------------
// Value sources for the streaming finders: any callable yielding
// optional<Value>, empty meaning the stream ended.

inline auto as_source(StreamCursor& cursor) {
    return [&cursor]() -> std::optional<Value> { return cursor.next(); };
}

inline auto as_source(std::vector<Value> values) {
    return [values = std::move(values), i = std::size_t{0}]() mutable -> std::optional<Value> {
        if (i >= values.size()) return std::nullopt;
        return values[i++];
    };
}

inline auto as_source(const Seq& seq) { return as_source(seq.values()); }

struct StreamFindOutcome {
    enum class Status { found, budget_exhausted, source_ended };
    Status status = Status::budget_exhausted;
    std::optional<APWitness> witness;
    std::uint64_t consumed = 0;

    explicit operator bool() const { return status == Status::found; }
};

inline constexpr std::uint64_t kDefaultStreamBudget = 1'000'000;

namespace detail {

// Position store: dense table for small values, hash map above.  Doubles as
// the duplicate detector.  Positions are 1-based; 0 means absent.
class PositionStore {
public:
    std::uint64_t lookup(Value v) const {
        if (v < static_cast<Value>(dense_.size())) return dense_[static_cast<std::size_t>(v)];
        const auto it = sparse_.find(v);
        return it == sparse_.end() ? 0 : it->second;
    }

    // False if v was already present.
    bool insert(Value v, std::uint64_t pos) {
        if (v < kDenseCap) {
            if (v >= static_cast<Value>(dense_.size()))
                dense_.resize(std::max<std::size_t>(static_cast<std::size_t>(v) + 1,
                                                    dense_.size() * 2),
                              0);
            auto& slot = dense_[static_cast<std::size_t>(v)];
            if (slot != 0) return false;
            slot = pos;
            return true;
        }
        return sparse_.emplace(v, pos).second;
    }

private:
    static constexpr Value kDenseCap = Value{1} << 22;
    std::vector<std::uint64_t> dense_;
    std::unordered_map<Value, std::uint64_t> sparse_;
};

inline void check_stream_value(Value v, std::uint64_t pos) {
    if (v < 1)
        throw domain_error("stream value " + std::to_string(v) + " at position " +
                           std::to_string(pos) + " is not a positive integer");
}

}  // namespace detail

// ---------------------------------------------------------------------------
// find_3ap_streaming: the constructive procedure — take the first term a1,
// wait for the first larger term ak, then wait for 2*ak - a1.  On any
// permutation of the positive integers all three eventually appear.

template <typename Source>
StreamFindOutcome find_3ap_streaming(Source&& source, std::uint64_t budget = kDefaultStreamBudget) {
    StreamFindOutcome out;
    detail::PositionStore seen;
    Value a1 = 0, ak = 0;
    std::uint64_t k_pos = 0;
    __int128 target = 0;
    bool have_a1 = false, have_ak = false;

    while (out.consumed < budget) {
        std::optional<Value> nv = source();
        if (!nv) {
            out.status = StreamFindOutcome::Status::source_ended;
            return out;
        }
        const Value v = *nv;
        const std::uint64_t pos = ++out.consumed;
        detail::check_stream_value(v, pos);
        if (!seen.insert(v, pos))
            throw domain_error("duplicate stream value " + std::to_string(v) + " at position " +
                               std::to_string(pos));

        if (!have_a1) {
            a1 = v;
            have_a1 = true;
        } else if (!have_ak) {
            if (v > a1) {
                ak = v;
                k_pos = pos;
                have_ak = true;
                target = __int128{2} * ak - a1;
            }
        } else if (__int128{v} == target) {
            out.status = StreamFindOutcome::Status::found;
            out.witness = APWitness{{1, k_pos, pos}, {a1, ak, v}, ak - a1};
            return out;
        }
    }
    out.status = StreamFindOutcome::Status::budget_exhausted;
    return out;
}

// ---------------------------------------------------------------------------
// find_odd3ap_streaming: exact incremental detection of odd-difference
// 3AP subsequences.  An arriving value v closes a progression (x, y, v)
// exactly when x arrived earlier than y, y = (x + v)/2, and v - x is
// congruent to 2 mod 4 (same parity, odd half-difference).  Scanning prior
// candidates in arrival order yields the lexicographically least position
// triple among those completed by v.

template <typename Source>
StreamFindOutcome find_odd3ap_streaming(Source&& source, std::uint64_t budget = kDefaultStreamBudget) {
    StreamFindOutcome out;
    detail::PositionStore seen;
    // Prior values bucketed by residue mod 4, in arrival order.
    std::array<std::vector<std::pair<Value, std::uint64_t>>, 4> buckets;

    while (out.consumed < budget) {
        std::optional<Value> nv = source();
        if (!nv) {
            out.status = StreamFindOutcome::Status::source_ended;
            return out;
        }
        const Value v = *nv;
        const std::uint64_t pos = ++out.consumed;
        detail::check_stream_value(v, pos);
        if (!seen.insert(v, pos))
            throw domain_error("duplicate stream value " + std::to_string(v) + " at position " +
                               std::to_string(pos));

        // x == v - 2 (mod 4) <=> (v - x) == 2 (mod 4)
        const auto& candidates = buckets[static_cast<std::size_t>((v + 2) & 3)];
        for (const auto& [x, x_pos] : candidates) {
            const Value y = x + (v - x) / 2;  // midpoint, exact: v - x is even
            const std::uint64_t y_pos = seen.lookup(y);
            if (y_pos > x_pos) {
                out.status = StreamFindOutcome::Status::found;
                out.witness = APWitness{{x_pos, y_pos, pos}, {x, y, v}, (v - x) / 2};
                return out;
            }
        }
        buckets[static_cast<std::size_t>(v & 3)].emplace_back(v, pos);
    }
    out.status = StreamFindOutcome::Status::budget_exhausted;
    return out;
}

// ---------------------------------------------------------------------------
// explain_odd3ap: the proof objects behind odd-difference inevitability.
// Normalize the prefix (drop values below the first term, shift so it
// becomes 1), locate the first even term a_k, and report the case split on
// a_j = max of the earlier terms:
//   case 1   a_j < 2a_k - 1: the witness (1, a_k, 2a_k - 1) is pending —
//            its third value must appear later.
//   case 2   otherwise: d = a_j - a_k is odd; any odd-difference 3AP among
//            the 11-value watch set {a_j + t*d : t = -1..9} transfers to
//            the stream, and arrivals in the watch set induce a partial
//            permutation of {1..11} via t -> (v - a_j)/d + 2, beginning 2, 1.

struct StreamAnalysis {
    enum class Case { pending_witness, watch_set };

    Value a1 = 0;       // original first term; normalization subtracts a1 - 1
    std::size_t k = 0;  // 1-based index of the first even value among kept terms
    Value ak = 0;       // normalized
    Value aj = 0;       // normalized max of kept terms before k
    Case kind = Case::pending_witness;

    std::array<Value, 3> pending{};  // case 1, normalized values
    Value d = 0;                     // case 2
    std::vector<Value> watch_set;    // case 2, t = -1..9 in order
    Seq induced;                     // case 2, arrival-order labels in {1..11}
};

inline std::optional<StreamAnalysis> explain_odd3ap(const Seq& prefix) {
    if (prefix.size() == 0) return std::nullopt;
    const Value a1 = prefix[0];

    std::vector<Value> kept;  // normalized survivors, arrival order
    kept.reserve(prefix.size());
    for (Value v : prefix)
        if (v >= a1) kept.push_back(v - (a1 - 1));

    std::size_t k = 0;  // 1-based
    for (std::size_t i = 0; i < kept.size(); ++i)
        if (kept[i] % 2 == 0) {
            k = i + 1;
            break;
        }
    if (k == 0) return std::nullopt;  // no even value yet: insufficient data

    StreamAnalysis res;
    res.a1 = a1;
    res.k = k;
    res.ak = kept[k - 1];
    res.aj = *std::max_element(kept.begin(), kept.begin() + static_cast<std::ptrdiff_t>(k - 1));

    if (res.aj < 2 * res.ak - 1) {
        res.kind = StreamAnalysis::Case::pending_witness;
        res.pending = {1, res.ak, 2 * res.ak - 1};
        return res;
    }

    res.kind = StreamAnalysis::Case::watch_set;
    res.d = res.aj - res.ak;  // odd: a_j odd (max of odd terms), a_k even
    res.watch_set.reserve(11);
    for (Value t = -1; t <= 9; ++t)
        res.watch_set.push_back(checked_add(res.aj, checked_mul(t, res.d)));

    std::vector<Value> labels;
    for (Value v : kept) {
        const Value off = v - res.aj;
        if (off % res.d != 0) continue;
        const Value t = off / res.d;
        if (t < -1 || t > 9) continue;
        labels.push_back(t + 2);
    }
    res.induced = Seq(std::move(labels));
    return res;
}

}  // namespace apfree
