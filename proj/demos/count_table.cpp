// Prints M(n) — the number of 3AP-free permutations of {1..n} — for small n,
// next to the classical bounds, with odd/even-difference variants.

#include <iostream>

#include "apfree/apfree.hpp"

int main() {
    using namespace apfree;
    std::cout << "  n        M(n)    2^(n-1)   fact-bound   M_odd(n)  M_even(n)\n";
    for (Value n = 1; n <= 10; ++n) {
        const auto any = count_apfree(CountQuery(n));
        const auto odd = count_apfree(CountQuery(n, APConstraint(3, Parity::odd)));
        const auto even = count_apfree(CountQuery(n, APConstraint(3, Parity::even)));
        const auto davis = davis_bounds(n);
        std::cout.width(3);
        std::cout << n;
        std::cout.width(12);
        std::cout << any.count.str();
        std::cout.width(11);
        std::cout << davis.lower.str();
        std::cout.width(13);
        std::cout << davis.upper.str();
        std::cout.width(11);
        std::cout << odd.count.str();
        std::cout.width(11);
        std::cout << even.count.str();
        std::cout << '\n';
    }
    return 0;
}
