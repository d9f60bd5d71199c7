#pragma once

#include <cstddef>
#include <string>

#include "shapeflow/material.hpp"

namespace shapeflow::kern {

// Batched evaluation of the energy density and its stresses over arrays of
// 2x2 matrices in SoA layout. These are the inner loops of every energy,
// gradient, and Hessian assembly; a scalar reference implementation and an
// AVX2 variant are selected once at runtime. The two backends agree to
// floating-point noise and are equivalence-tested against each other and
// against the single-matrix functions in energy.hpp.

enum class Isa { scalar, avx2 };

bool avx2_supported();
Isa active_isa();
const char* isa_name(Isa isa);

// Test hook: pin the dispatch to one backend (throws invalid_input if the
// requested backend is unavailable on this machine). reset_isa() restores
// automatic selection.
void force_isa(Isa isa);
void reset_isa();

// sum_i coeff[i] * W(A_i). Returns +infinity if det(A_i) <= 0 for any i
// (the self-penetration barrier propagates through sums).
double weighted_energy_sum(const double* a00, const double* a01,
                           const double* a10, const double* a11,
                           const double* coeff, std::size_t n,
                           const MaterialParams& p);

// w[i] = W(A_i); +infinity where det(A_i) <= 0.
void energy_values(const double* a00, const double* a01, const double* a10,
                   const double* a11, double* w, std::size_t n,
                   const MaterialParams& p);

// g**[i] = coeff[i] * DW(A_i); returns sum_i coeff[i] * W(A_i).
// Requires det(A_i) > 0 for all i; throws singular_deformation otherwise.
double weighted_energy_and_stress(const double* a00, const double* a01,
                                  const double* a10, const double* a11,
                                  const double* coeff, std::size_t n,
                                  const MaterialParams& p, double* g00,
                                  double* g01, double* g10, double* g11);

namespace detail {

struct Backend {
  double (*weighted_energy_sum)(const double*, const double*, const double*,
                                const double*, const double*, std::size_t,
                                const MaterialParams&);
  void (*energy_values)(const double*, const double*, const double*,
                        const double*, double*, std::size_t,
                        const MaterialParams&);
  // Returns NaN if a non-positive determinant was encountered.
  double (*weighted_energy_and_stress)(const double*, const double*,
                                       const double*, const double*,
                                       const double*, std::size_t,
                                       const MaterialParams&, double*, double*,
                                       double*, double*);
};

const Backend& scalar_backend();
const Backend& avx2_backend();  // only valid if avx2_supported()

}  // namespace detail

}  // namespace shapeflow::kern
