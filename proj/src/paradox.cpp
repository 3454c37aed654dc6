#include "simpcoll/paradox.hpp"

namespace simpcoll {

namespace {

__extension__ typedef __int128 wide;

void require_denominator(std::int64_t d) {
  if (d <= 0) throw InputError("fraction_reversal: denominators must be positive");
}

// a/b < c/d for positive denominators.
bool less(std::int64_t a, std::int64_t b, std::int64_t c, std::int64_t d) {
  return static_cast<wide>(a) * d < static_cast<wide>(c) * b;
}

}  // namespace

bool fraction_reversal(std::int64_t k, std::int64_t l, std::int64_t K, std::int64_t L, std::int64_t m,
                       std::int64_t n, std::int64_t M, std::int64_t N) {
  for (auto d : {l, L, n, N}) require_denominator(d);
  return less(k, l, K, L) && less(m, n, M, N) && less(K + M, L + N, k + m, l + n);
}

}  // namespace simpcoll
