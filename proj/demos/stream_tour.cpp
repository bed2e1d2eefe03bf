// Walks the three infinite constructions: emits annotated prefixes, runs the
// streaming 3AP finder on a deliberately bad stream, and shows the density
// samples converging to their closed forms.

#include <iostream>

#include "apfree/apfree.hpp"

int main() {
    using namespace apfree;

    for (const auto& spec : {BlockStreamSpec::theorem2(), BlockStreamSpec::fourfree(2),
                             BlockStreamSpec::threefree()}) {
        StreamCursor cur(spec);
        std::cout << to_string(spec.kind) << ":";
        for (int i = 0; i < 15; ++i) {
            if (cur.at_block_start()) std::cout << "  |" << cur.current_block().label << "|";
            std::cout << ' ' << cur.next();
        }
        std::cout << "\n";
    }

    // The ascending integers contain a 3AP immediately; the finder traces
    // the constructive procedure (first term, first larger term, midpoint).
    auto ascending = [v = Value{0}]() mutable -> std::optional<Value> { return ++v; };
    const auto hit = find_3ap_streaming(ascending);
    std::cout << "\nascending integers: witness values (" << hit.witness->values[0] << ", "
              << hit.witness->values[1] << ", " << hit.witness->values[2] << ") after consuming "
              << hit.consumed << " values\n";

    // No permutation of the positive integers dodges 3-term odd-difference
    // APs, theorem2 included — its guarantee is the absence of 4-term ones.
    // The incremental finder surfaces the first 3-term witness early, while
    // the detector confirms a long prefix is clean at length 4.
    StreamCursor t2(BlockStreamSpec::theorem2());
    auto src = as_source(t2);
    const auto hit3 = find_odd3ap_streaming(src, 20'000);
    std::cout << "theorem2, odd-difference 3-term finder: witness values ("
              << hit3.witness->values[0] << ", " << hit3.witness->values[1] << ", "
              << hit3.witness->values[2] << ") after " << hit3.consumed
              << " values — unavoidable for any permutation of the positive integers\n";
    StreamCursor t2b(BlockStreamSpec::theorem2());
    const Seq long_prefix = t2b.next_n(4000);
    std::cout << "theorem2, 4-term odd-difference detector on the first 4000 values: "
              << (find_ap(long_prefix, APConstraint(4, Parity::odd)) ? "witness (bug!)"
                                                                     : "none, as constructed")
              << "\n\n";

    const auto profile = density_profile(BlockStreamSpec::fourfree(2), 6);
    const auto [upper, lower] = closed_form_densities(BlockStreamSpec::fourfree(2));
    std::cout << "fourfree(2) density samples (closed form: upper " << upper.str() << ", lower "
              << lower.str() << "):\n";
    for (const auto& s : profile.samples)
        std::cout << "  A(" << s.n << ") = " << s.count << "  ratio " << to_decimal_string(s.ratio)
                  << '\n';
    return 0;
}
