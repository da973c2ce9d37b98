#pragma once

#include "bsharp/coefficient.hpp"

// mpq_class(n, d) does not reduce; GMP arithmetic requires canonical input.
inline bsharp::BigRational rat(long num, long den) {
  bsharp::BigRational q(num, den);
  q.canonicalize();
  return q;
}
