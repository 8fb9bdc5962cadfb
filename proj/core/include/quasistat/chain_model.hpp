#ifndef QUASISTAT_CHAIN_MODEL_HPP
#define QUASISTAT_CHAIN_MODEL_HPP

#include <cstdint>
#include <string>

#include "quasistat/birth_death.hpp"
#include "quasistat/log_domain.hpp"
#include "quasistat/series.hpp"

namespace quasistat {

// Potential coefficients in log domain.
//   AbsorbedAtZero:   pi_1 = 1, pi_i = b_1...b_{i-1} / (d_2...d_i); returns
//                     pi_1..pi_n (first_index 1).
//   ReflectingAtZero: pi_0 = 1, pi_i = b_0...b_{i-1} / (d_1...d_i); returns
//                     pi_0..pi_n (first_index 0).
// Satisfies the detailed-balance recursion b_i pi_i = d_{i+1} pi_{i+1}.
LogWeightVector potential_coefficients(const BirthDeathSpec& spec, std::int64_t n);

// The four series controlling the boundary at infinity:
//   A = sum 1/(b_i pi_i)                     B = sum pi_i
//   R = sum (1/(b_i pi_i)) sum_{j<=i} pi_j   S = sum (1/(b_i pi_i)) sum_{j>i} pi_j
// summed from the first state of the convention. They obey R + S = A B,
// A = inf => R = inf, and S < inf => B < inf.
struct BoundarySeries {
  SeriesResult A, B, R, S;
  double tol = 0.0;
};

BoundarySeries boundary_series(const BirthDeathSpec& spec, double tol_series = 1e-10,
                               std::int64_t max_terms = 10000);

enum class BoundaryKind { Entrance, Exit, Natural, Regular, Undetermined };

struct BoundaryClass {
  BoundaryKind kind = BoundaryKind::Undetermined;
  BoundarySeries series;
};

// Pure function of the R/S verdicts:
//   Entrance: R = inf, S < inf     Exit:    R < inf, S = inf
//   Natural:  both infinite        Regular: both finite
// Any Undetermined verdict makes the class Undetermined.
BoundaryClass classify_boundary(const BoundarySeries& series);

std::string to_string(BoundaryKind kind);
std::string to_string(SeriesVerdict verdict);

}  // namespace quasistat

#endif
