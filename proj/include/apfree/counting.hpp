#pragma once

// Exhaustive counting and enumeration of AP-free permutations of {1..n}
// under an APConstraint, with pruned backtracking, a factorial-filter
// oracle, and prefix-constrained counting.
//
// Two legality engines drive the same search:
//   k == 3   forbidden-value propagation: appending y after a placed x
//            permanently forbids 2y - x on that branch (it would complete
//            the progression x, y, 2y-x).  O(1) legality tests.
//   k >= 4   incremental chain lengths keyed by (placed value, difference):
//            appending v is legal iff no parity-matching chain of length
//            k-1 ends at some placed x with difference v - x.

#include <array>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <thread>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "apfree/core.hpp"

namespace apfree {

using BigInt = boost::multiprecision::cpp_int;

struct CountQuery {
    Value n;
    APConstraint constraint;
    Seq prefix;

    CountQuery(Value n_, APConstraint c = APConstraint(), Seq prefix_ = Seq())
        : n(n_), constraint(c), prefix(std::move(prefix_)) {
        if (n < 1) throw domain_error("CountQuery requires n >= 1");
        if (prefix.size() > static_cast<std::size_t>(n))
            throw domain_error("prefix longer than n");
        for (Value v : prefix)
            if (v > n) throw domain_error("prefix value " + std::to_string(v) + " exceeds n");
    }

    friend bool operator==(const CountQuery& a, const CountQuery& b) {
        return a.n == b.n && a.constraint.k == b.constraint.k &&
               a.constraint.parity == b.constraint.parity && a.prefix == b.prefix;
    }
};

struct CountRecord {
    CountQuery query;
    BigInt count;
    std::uint64_t node_count = 0;       // search-tree placements, diagnostics
    std::chrono::milliseconds elapsed{0};
};

struct CountOptions {
    Value max_n = 20;     // feasibility ceiling for exhaustive runs
    unsigned threads = 1; // worker threads; 0 = hardware concurrency
};

namespace detail {

// Exact counts are accumulated per task in 128 bits; n is capped so that
// even n! stays representable.
inline constexpr Value kEngineMaxN = 32;

class Searcher {
public:
    Searcher(Value n, APConstraint c)
        : n_(n), k_(c.k), parity_(c.parity), k3_(c.k == 3) {
        if (n < 1 || n > kEngineMaxN)
            throw feasibility_error("search engine supports 1 <= n <= " +
                                    std::to_string(kEngineMaxN));
        placed_.reserve(static_cast<std::size_t>(n));
        if (!k3_) chain_.assign(static_cast<std::size_t>((n + 1) * (2 * n + 1)), 0);
    }

    Value n() const { return n_; }
    std::size_t depth() const { return placed_.size(); }
    bool full() const { return placed_.size() == static_cast<std::size_t>(n_); }
    const std::vector<Value>& placed() const { return placed_; }
    std::uint64_t nodes() const { return nodes_; }
    void reset_nodes() { nodes_ = 0; }

    bool legal(Value v) const {
        if (used_[static_cast<std::size_t>(v)]) return false;
        if (k3_) return forbid_[static_cast<std::size_t>(v)] == 0;
        for (Value x : placed_) {
            const Value d = v - x;
            if (!parity_matches(parity_, d)) continue;
            int len = chain_at(x, d);
            if (len == 0) len = 1;
            if (len + 1 >= k_) return false;
        }
        return true;
    }

    void place(Value v) {
        ++nodes_;
        undo_marks_.push_back(undo_.size());
        if (k3_) {
            for (Value x : placed_) {
                const Value d = v - x;
                if (!parity_matches(parity_, d)) continue;
                const Value t = 2 * v - x;
                if (t >= 1 && t <= n_ && !used_[static_cast<std::size_t>(t)]) {
                    ++forbid_[static_cast<std::size_t>(t)];
                    undo_.push_back(t);
                }
            }
        } else {
            for (Value x : placed_) {
                const Value d = v - x;
                if (!parity_matches(parity_, d)) continue;
                int len = chain_at(x, d);
                if (len == 0) len = 1;
                chain_mut(v, d) = static_cast<std::uint8_t>(std::min(len + 1, 255));
            }
        }
        used_[static_cast<std::size_t>(v)] = true;
        placed_.push_back(v);
    }

    void unplace() {
        const Value v = placed_.back();
        placed_.pop_back();
        used_[static_cast<std::size_t>(v)] = false;
        if (k3_) {
            const std::size_t mark = undo_marks_.back();
            while (undo_.size() > mark) {
                --forbid_[static_cast<std::size_t>(undo_.back())];
                undo_.pop_back();
            }
        } else {
            auto row = chain_.begin() + static_cast<std::ptrdiff_t>(v * (2 * n_ + 1));
            std::fill(row, row + (2 * n_ + 1), 0);
        }
        undo_marks_.pop_back();
    }

    // Places the prefix; false means the prefix itself completes a
    // constrained AP (every extension does too, so the count is zero).
    bool seed(const Seq& prefix) {
        for (Value v : prefix) {
            if (!legal(v)) return false;
            place(v);
        }
        return true;
    }

private:
    int chain_at(Value v, Value d) const {
        return chain_[static_cast<std::size_t>(v * (2 * n_ + 1) + d + n_)];
    }
    std::uint8_t& chain_mut(Value v, Value d) {
        return chain_[static_cast<std::size_t>(v * (2 * n_ + 1) + d + n_)];
    }

    Value n_;
    int k_;
    Parity parity_;
    bool k3_;
    std::array<bool, kEngineMaxN + 1> used_{};
    std::array<std::uint16_t, kEngineMaxN + 1> forbid_{};
    std::vector<Value> placed_;
    std::vector<std::size_t> undo_marks_;
    std::vector<Value> undo_;
    std::vector<std::uint8_t> chain_;
    std::uint64_t nodes_ = 0;
};

inline unsigned __int128 count_rec(Searcher& s) {
    if (s.full()) return 1;
    unsigned __int128 total = 0;
    for (Value v = 1; v <= s.n(); ++v) {
        if (!s.legal(v)) continue;
        s.place(v);
        total += count_rec(s);
        s.unplace();
    }
    return total;
}

// Ascending candidate order makes completions arrive in lexicographic
// order of the full value sequence.  Visitor returns false to stop.
template <typename Visitor>
inline bool enumerate_rec(Searcher& s, Visitor&& visit) {
    if (s.full()) return visit(s.placed());
    for (Value v = 1; v <= s.n(); ++v) {
        if (!s.legal(v)) continue;
        s.place(v);
        const bool keep_going = enumerate_rec(s, visit);
        s.unplace();
        if (!keep_going) return false;
    }
    return true;
}

struct SplitTask {
    std::array<Value, 2> ext{};
    int len = 0;
};

// Fixed-depth split below the user prefix: every legal one- or two-value
// extension becomes an independent task.  The placements performed here are
// exactly the depth-1/2 placements the sequential recursion would make, so
// node counts stay schedule-independent.
inline std::vector<SplitTask> make_split_tasks(Searcher& s, int split_depth) {
    std::vector<SplitTask> tasks;
    for (Value v1 = 1; v1 <= s.n(); ++v1) {
        if (!s.legal(v1)) continue;
        s.place(v1);
        if (split_depth == 1) {
            tasks.push_back({{v1, 0}, 1});
        } else {
            for (Value v2 = 1; v2 <= s.n(); ++v2) {
                if (!s.legal(v2)) continue;
                s.place(v2);
                tasks.push_back({{v1, v2}, 2});
                s.unplace();
            }
        }
        s.unplace();
    }
    return tasks;
}

inline BigInt from_u128(unsigned __int128 x) {
    const std::uint64_t hi = static_cast<std::uint64_t>(x >> 64);
    const std::uint64_t lo = static_cast<std::uint64_t>(x);
    BigInt r = hi;
    r <<= 64;
    r += lo;
    return r;
}

inline unsigned resolve_threads(unsigned requested) {
    if (requested != 0) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// count_apfree: exact count of permutations of {1..n} extending the prefix
// that contain no k-term AP (parity-filtered) as a subsequence.  The search
// tree is split at a fixed depth into independent tasks; totals do not
// depend on scheduling.

inline CountRecord count_apfree(const CountQuery& q, const CountOptions& opts = {}) {
    if (q.n > opts.max_n)
        throw feasibility_error("n = " + std::to_string(q.n) + " exceeds the feasibility ceiling " +
                                std::to_string(opts.max_n));
    const auto t0 = std::chrono::steady_clock::now();

    detail::Searcher root(q.n, q.constraint);
    CountRecord rec{q, 0, 0, {}};
    if (!root.seed(q.prefix)) {
        rec.count = 0;
        rec.elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
            std::chrono::steady_clock::now() - t0);
        return rec;
    }
    root.reset_nodes();

    const int remaining = static_cast<int>(q.n) - static_cast<int>(q.prefix.size());
    if (remaining == 0) {
        rec.count = 1;
        rec.elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
            std::chrono::steady_clock::now() - t0);
        return rec;
    }

    const int split_depth = std::min(remaining, 2);
    auto tasks = detail::make_split_tasks(root, split_depth);
    const std::uint64_t split_nodes = root.nodes();

    std::vector<BigInt> counts(tasks.size());
    std::vector<std::uint64_t> nodes(tasks.size(), 0);

    auto run_task = [&](std::size_t idx) {
        const auto& task = tasks[idx];
        detail::Searcher s(q.n, q.constraint);
        std::vector<Value> seeded(q.prefix.values());
        for (int i = 0; i < task.len; ++i) seeded.push_back(task.ext[static_cast<std::size_t>(i)]);
        const bool ok = s.seed(Seq::unchecked(std::move(seeded)));
        (void)ok;  // extensions came from legal placements
        s.reset_nodes();
        counts[idx] = s.full() ? BigInt(1) : detail::from_u128(detail::count_rec(s));
        nodes[idx] = s.nodes();
    };

    const unsigned threads = std::min<std::size_t>(detail::resolve_threads(opts.threads),
                                                   std::max<std::size_t>(tasks.size(), 1));
    if (threads <= 1) {
        for (std::size_t i = 0; i < tasks.size(); ++i) run_task(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        pool.reserve(threads);
        for (unsigned t = 0; t < threads; ++t)
            pool.emplace_back([&] {
                for (std::size_t i = next.fetch_add(1); i < tasks.size(); i = next.fetch_add(1))
                    run_task(i);
            });
        for (auto& th : pool) th.join();
    }

    BigInt total = 0;
    std::uint64_t total_nodes = split_nodes;
    for (std::size_t i = 0; i < tasks.size(); ++i) {
        total += counts[i];
        total_nodes += nodes[i];
    }
    rec.count = std::move(total);
    rec.node_count = total_nodes;
    rec.elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
        std::chrono::steady_clock::now() - t0);
    return rec;
}

// ---------------------------------------------------------------------------
// enumerate_apfree: the first `limit` qualifying permutations in
// lexicographic order of the value sequence.

inline std::vector<Seq> enumerate_apfree(const CountQuery& q, std::uint64_t limit,
                                         const CountOptions& opts = {}) {
    if (q.n > opts.max_n)
        throw feasibility_error("n = " + std::to_string(q.n) + " exceeds the feasibility ceiling " +
                                std::to_string(opts.max_n));
    if (limit == 0) throw domain_error("enumerate_apfree requires limit >= 1");
    std::vector<Seq> out;
    detail::Searcher s(q.n, q.constraint);
    if (!s.seed(q.prefix)) return out;
    detail::enumerate_rec(s, [&](const std::vector<Value>& perm) {
        out.push_back(Seq::unchecked(std::vector<Value>(perm)));
        return out.size() < limit;
    });
    return out;
}

// ---------------------------------------------------------------------------
// oracle_count: independent verification route — generate every completion
// of the prefix and filter with the detector.  Factorial guard keeps it at
// desk scale.

inline CountRecord oracle_count(const CountQuery& q) {
    const std::size_t free_slots = static_cast<std::size_t>(q.n) - q.prefix.size();
    if (free_slots > 10)
        throw feasibility_error("oracle_count requires n - |prefix| <= 10 (got " +
                                std::to_string(free_slots) + ")");
    const auto t0 = std::chrono::steady_clock::now();

    std::vector<Value> rest;
    rest.reserve(free_slots);
    {
        std::vector<bool> in_prefix(static_cast<std::size_t>(q.n) + 1, false);
        for (Value v : q.prefix) in_prefix[static_cast<std::size_t>(v)] = true;
        for (Value v = 1; v <= q.n; ++v)
            if (!in_prefix[static_cast<std::size_t>(v)]) rest.push_back(v);
    }

    std::vector<Value> full(q.prefix.values());
    full.resize(static_cast<std::size_t>(q.n));

    CountRecord rec{q, 0, 0, {}};
    BigInt count = 0;
    do {
        std::copy(rest.begin(), rest.end(), full.begin() + static_cast<std::ptrdiff_t>(q.prefix.size()));
        ++rec.node_count;  // permutations examined
        if (!find_ap(std::span<const Value>(full), q.constraint)) ++count;
    } while (std::next_permutation(rest.begin(), rest.end()));

    rec.count = std::move(count);
    rec.elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
        std::chrono::steady_clock::now() - t0);
    return rec;
}

// ---------------------------------------------------------------------------
// check_prefix_forces_ap: true iff every permutation of {1..n} beginning
// with the prefix contains a constrained AP as a subsequence.  When false,
// the lexicographically first avoiding permutation is the counterexample.

struct PrefixForceResult {
    bool forces = false;
    std::optional<Seq> counterexample;
    std::uint64_t node_count = 0;
    std::chrono::milliseconds elapsed{0};
};

inline PrefixForceResult check_prefix_forces_ap(Value n, const Seq& prefix, const APConstraint& c,
                                                const CountOptions& opts = {}) {
    const CountQuery q(n, c, prefix);
    if (q.n > opts.max_n)
        throw feasibility_error("n = " + std::to_string(q.n) + " exceeds the feasibility ceiling " +
                                std::to_string(opts.max_n));
    const auto t0 = std::chrono::steady_clock::now();
    PrefixForceResult res;
    detail::Searcher s(n, c);
    if (s.seed(prefix)) {
        s.reset_nodes();
        detail::enumerate_rec(s, [&](const std::vector<Value>& perm) {
            res.counterexample = Seq::unchecked(std::vector<Value>(perm));
            return false;  // first avoiding permutation suffices
        });
        res.node_count = s.nodes();
    }
    res.forces = !res.counterexample.has_value();
    res.elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
        std::chrono::steady_clock::now() - t0);
    return res;
}

}  // namespace apfree
