#pragma once

// Exact verification of every stated inequality on M(n), the number of
// 3AP-free permutations of {1..n}:
//   davis:       2^(n-1) <= M(n) <= floor((n+1)/2)! * ceil((n+1)/2)!
//   sharma:      M(n) <= 2.7^n / 21 for n >= 11, tested as the integer
//                inequality M * 21 * 10^n <= 27^n
//   theorem1:    M(n) >= (1/2) c^n for n >= 8 with c = 2132^(1/10),
//                tested as (2M)^10 >= 2132^n
//   recurrences: M(2n) >= 2 M(n)^2 and M(2n+1) >= 2 M(n) M(n+1)
// Everything is big-integer arithmetic; no rounding enters a verdict.

#include <compare>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "apfree/core.hpp"
#include "apfree/counting.hpp"

namespace apfree {

struct DavisBounds {
    BigInt lower;  // 2^(n-1)
    BigInt upper;  // floor((n+1)/2)! * ceil((n+1)/2)!
};

inline BigInt big_pow(BigInt base, Value exp) {
    BigInt r = 1;
    for (Value i = 0; i < exp; ++i) r *= base;
    return r;
}

inline BigInt factorial(Value n) {
    BigInt r = 1;
    for (Value i = 2; i <= n; ++i) r *= i;
    return r;
}

inline DavisBounds davis_bounds(Value n) {
    if (n < 1) throw domain_error("davis_bounds requires n >= 1");
    return {big_pow(2, n - 1), factorial((n + 1) / 2) * factorial(n / 2 + 1)};
}

inline bool sharma_upper_holds(Value n, const BigInt& m) {
    if (n < 11) throw domain_error("the sharma bound is asserted only for n >= 11");
    return m * 21 * big_pow(10, n) <= big_pow(27, n);
}

// (2M)^10 versus 2132^n; the bound holds when >=, with equality exactly
// when M = (1/2) * 2132^(n/10).
inline std::strong_ordering theorem1_lower_compare(Value n, const BigInt& m) {
    const BigInt lhs = big_pow(2 * m, 10);
    const BigInt rhs = big_pow(2132, n);
    if (lhs < rhs) return std::strong_ordering::less;
    if (lhs > rhs) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
}

inline bool theorem1_lower_holds(Value n, const BigInt& m) {
    if (n < 8) throw domain_error("the c = 2132^(1/10) lower bound is asserted only for n >= 8");
    return theorem1_lower_compare(n, m) != std::strong_ordering::less;
}

// ---------------------------------------------------------------------------
// Doubling recurrences over whatever values are supplied; absent pairs are
// skipped, not failed.

struct RecurrenceResult {
    Value target = 0;  // 2n or 2n+1
    Value half = 0;    // n
    bool even_case = true;
    BigInt lhs, rhs;
    bool holds = false;
    std::string relation;
};

inline std::vector<RecurrenceResult> recurrence_check(const std::map<Value, BigInt>& values) {
    if (values.empty()) throw domain_error("recurrence_check requires a nonempty map");
    std::vector<RecurrenceResult> out;
    for (const auto& [t, m] : values) {
        RecurrenceResult r;
        r.target = t;
        r.lhs = m;
        if (t % 2 == 0) {
            const Value h = t / 2;
            const auto it = values.find(h);
            if (it == values.end()) continue;
            r.half = h;
            r.even_case = true;
            r.rhs = 2 * it->second * it->second;
            r.relation = "M(" + std::to_string(t) + ") >= 2*M(" + std::to_string(h) + ")^2 = " +
                         r.rhs.str();
        } else {
            const Value h = (t - 1) / 2;
            if (h < 1) continue;
            const auto lo = values.find(h);
            const auto hi = values.find(h + 1);
            if (lo == values.end() || hi == values.end()) continue;
            r.half = h;
            r.even_case = false;
            r.rhs = 2 * lo->second * hi->second;
            r.relation = "M(" + std::to_string(t) + ") >= 2*M(" + std::to_string(h) + ")*M(" +
                         std::to_string(h + 1) + ") = " + r.rhs.str();
        }
        r.holds = r.lhs >= r.rhs;
        out.push_back(std::move(r));
    }
    return out;
}

// ---------------------------------------------------------------------------
// The published table of M(8)..M(15) from the 1977 Davis–Entringer–Graham–
// Simmons enumeration; rows derived from it carry provenance "paper".

enum class Provenance { paper, computed };

inline std::string to_string(Provenance p) {
    return p == Provenance::paper ? "paper" : "computed";
}

inline const std::map<Value, BigInt>& paper_m_table() {
    static const std::map<Value, BigInt> table = {{8, 282},    {9, 496},    {10, 1066},
                                                  {11, 2460},  {12, 6128},  {13, 12840},
                                                  {14, 29380}, {15, 73904}};
    return table;
}

// ---------------------------------------------------------------------------
// Ledger: one row per n with every applicable flag, plus the recurrence
// results over the supplied values.

struct BoundRow {
    Value n = 0;
    bool available = false;
    BigInt m;
    Provenance source = Provenance::computed;
    bool davis_lower_ok = false;
    bool davis_upper_ok = false;
    std::optional<bool> sharma_ok;    // only n >= 11
    std::optional<bool> theorem1_ok;  // only n >= 8
};

struct BoundLedger {
    std::vector<BoundRow> rows;
    std::vector<RecurrenceResult> recurrences;
};

using CountsSource = std::map<Value, std::pair<BigInt, Provenance>>;

inline BoundLedger bounds_ledger(Value n_max, const CountsSource& counts) {
    if (n_max < 1) throw domain_error("bounds_ledger requires n_max >= 1");
    BoundLedger ledger;
    std::map<Value, BigInt> plain;
    for (const auto& [n, entry] : counts) plain.emplace(n, entry.first);

    for (Value n = 1; n <= n_max; ++n) {
        BoundRow row;
        row.n = n;
        const auto it = counts.find(n);
        if (it == counts.end()) {
            ledger.rows.push_back(std::move(row));
            continue;
        }
        row.available = true;
        row.m = it->second.first;
        row.source = it->second.second;
        const DavisBounds db = davis_bounds(n);
        row.davis_lower_ok = db.lower <= row.m;
        row.davis_upper_ok = row.m <= db.upper;
        if (n >= 11) row.sharma_ok = sharma_upper_holds(n, row.m);
        if (n >= 8) row.theorem1_ok = theorem1_lower_holds(n, row.m);
        ledger.rows.push_back(std::move(row));
    }
    ledger.recurrences = recurrence_check(plain);
    return ledger;
}

// ---------------------------------------------------------------------------
// Cross-source agreement: recompute M(n) and compare with the published
// table.  Ledger flags over published values are only trusted once this
// passes; a mismatch is reported with both values.

struct ProvenanceMismatch {
    Value n = 0;
    BigInt computed;
    BigInt published;
};

inline std::vector<ProvenanceMismatch> cross_source_check(
    Value n_hi, const CountOptions& opts = {},
    const std::map<Value, BigInt>& published_table = paper_m_table()) {
    std::vector<ProvenanceMismatch> out;
    for (const auto& [n, published] : published_table) {
        if (n > n_hi) continue;
        const CountRecord rec = count_apfree(CountQuery(n), opts);
        if (rec.count != published) out.push_back({n, rec.count, published});
    }
    return out;
}

inline void ensure_source_agreement(Value n_hi, const CountOptions& opts = {},
                                    const std::map<Value, BigInt>& published_table = paper_m_table()) {
    const auto mismatches = cross_source_check(n_hi, opts, published_table);
    if (mismatches.empty()) return;
    std::string report = "provenance check failed:";
    for (const auto& mm : mismatches)
        report += " M(" + std::to_string(mm.n) + ") computed " + mm.computed.str() +
                  " vs published " + mm.published.str() + ";";
    throw conflict_error(report);
}

}  // namespace apfree
