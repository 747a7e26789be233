#pragma once

#include <functional>
#include <utility>

namespace ergodic {

// Skew product (H Wr h)(x, y) = (h(x), H_x(y)) over arbitrary carrier sets.
// `fiber(x)` returns the map H_x applied to the second coordinate. The pair map
// is a bijection whenever h and every H_x are.
template <class X, class Y, class Base, class Fiber>
auto skew_product(Base base, Fiber fiber) {
  return [base = std::move(base), fiber = std::move(fiber)](const std::pair<X, Y>& p) -> std::pair<X, Y> {
    return {std::invoke(base, p.first), std::invoke(fiber(p.first), p.second)};
  };
}

}  // namespace ergodic
