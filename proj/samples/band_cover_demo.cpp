// Prints the level-k covers of the spectrum at (a, b) = (1, 2) together with
// their Lebesgue measure, then a dimension estimate from cover(14).

#include <cstdio>

#include "fibspec.hpp"

int main() {
    const fibspec::HoppingPair p(1.0, 2.0);
    std::printf("%3s %8s %14s\n", "k", "bands", "measure");
    for (int k = 2; k <= 14; k += 2) {
        const fibspec::BandSet c = fibspec::cover(p, k, 1e-12);
        std::printf("%3d %8zu %14.8f\n", k, c.size(), fibspec::lebesgue_measure(c));
    }
    const auto d = fibspec::global_dimension(p, 14, 1e-12);
    std::printf("box dimension of cover(14): %.4f (r^2 = %.5f)\n", d.value, d.r_squared);
}
