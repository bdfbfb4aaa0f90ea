// Width-two Hadamard walk: print the three window masses against the limit coefficients.

#include <cstdio>
#include <cstdlib>
#include <numbers>

#include "dcqw/dcqw.hpp"

int main(int argc, char** argv) {
  using namespace dcqw;
  const int n = argc > 1 ? std::atoi(argv[1]) : 1000;
  const Vec2 g(std::numbers::sqrt2 / 2, std::numbers::sqrt2 / 2);
  auto st = init_product(make_hadamard(), g, stripe_for_width(2), n);
  const auto m = measure(evolve(std::move(st), n));
  const auto mm = mode_masses(m);
  const auto c = limit_coefficients(g);
  std::printf("n = %d\n", n);
  std::printf("left   %.6f  (limit %.6f)\n", mm.left, c.minus.real());
  std::printf("center %.6f  (limit %.6f)\n", mm.center, c.zero.real());
  std::printf("right  %.6f  (limit %.6f)\n", mm.right, c.plus.real());
}
