// AVX2/FMA backend. Compiled with -mavx2 -mfma in its own translation unit;
// only reached through the runtime dispatch in kernels.cpp.

#include "shapeflow/kernels.hpp"

#if !defined(__x86_64__) && !defined(__i386__)

namespace shapeflow::kern::detail {
// Non-x86 build: the dispatcher never selects this backend.
const Backend& avx2_backend() { return scalar_backend(); }
}  // namespace shapeflow::kern::detail

#else

#include <immintrin.h>

#include <cmath>
#include <limits>

namespace shapeflow::kern::detail {

namespace {

// Natural log of 4 positive normal doubles. Argument reduction to
// [sqrt(1/2), sqrt(2)) followed by the atanh series in z = (m-1)/(m+1);
// |z| <= 0.1716 keeps the truncation error below ~1e-15 absolute.
inline __m256d log4d(__m256d x) {
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d half = _mm256_set1_pd(0.5);

  __m256i bits = _mm256_castpd_si256(x);
  __m256i expi = _mm256_srli_epi64(bits, 52);
  const __m256i perm = _mm256_setr_epi32(0, 2, 4, 6, 1, 3, 5, 7);
  __m128i e32 = _mm256_castsi256_si128(_mm256_permutevar8x32_epi32(expi, perm));
  __m256d e = _mm256_cvtepi32_pd(e32);
  e = _mm256_sub_pd(e, _mm256_set1_pd(1023.0));

  const __m256i mant_mask = _mm256_set1_epi64x(0x000FFFFFFFFFFFFFLL);
  const __m256i exp_one = _mm256_set1_epi64x(0x3FF0000000000000LL);
  __m256d m = _mm256_castsi256_pd(
      _mm256_or_si256(_mm256_and_si256(bits, mant_mask), exp_one));

  const __m256d sqrt2 = _mm256_set1_pd(1.4142135623730951);
  __m256d gt = _mm256_cmp_pd(m, sqrt2, _CMP_GT_OQ);
  m = _mm256_blendv_pd(m, _mm256_mul_pd(m, half), gt);
  e = _mm256_blendv_pd(e, _mm256_add_pd(e, one), gt);

  __m256d z = _mm256_div_pd(_mm256_sub_pd(m, one), _mm256_add_pd(m, one));
  __m256d w = _mm256_mul_pd(z, z);

  __m256d poly = _mm256_set1_pd(1.0 / 17.0);
  poly = _mm256_fmadd_pd(poly, w, _mm256_set1_pd(1.0 / 15.0));
  poly = _mm256_fmadd_pd(poly, w, _mm256_set1_pd(1.0 / 13.0));
  poly = _mm256_fmadd_pd(poly, w, _mm256_set1_pd(1.0 / 11.0));
  poly = _mm256_fmadd_pd(poly, w, _mm256_set1_pd(1.0 / 9.0));
  poly = _mm256_fmadd_pd(poly, w, _mm256_set1_pd(1.0 / 7.0));
  poly = _mm256_fmadd_pd(poly, w, _mm256_set1_pd(1.0 / 5.0));
  poly = _mm256_fmadd_pd(poly, w, _mm256_set1_pd(1.0 / 3.0));

  __m256d two_z = _mm256_add_pd(z, z);
  __m256d logm = _mm256_fmadd_pd(_mm256_mul_pd(two_z, w), poly, two_z);

  const __m256d ln2 = _mm256_set1_pd(0.6931471805599453);
  return _mm256_fmadd_pd(e, ln2, logm);
}

inline double hsum4d(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(lo, _mm_unpackhi_pd(lo, lo)));
}

double avx2_weighted_energy_sum(const double* a00, const double* a01,
                                const double* a10, const double* a11,
                                const double* coeff, std::size_t n,
                                const MaterialParams& p) {
  const __m256d mu = _mm256_set1_pd(p.mu);
  const __m256d half_lambda = _mm256_set1_pd(0.5 * p.lambda);
  const __m256d c_log = _mm256_set1_pd(2.0 * p.mu + p.lambda);
  const __m256d c0 = _mm256_set1_pd(2.0 * p.mu + 0.5 * p.lambda);
  const __m256d zero = _mm256_setzero_pd();

  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d x00 = _mm256_loadu_pd(a00 + i);
    const __m256d x01 = _mm256_loadu_pd(a01 + i);
    const __m256d x10 = _mm256_loadu_pd(a10 + i);
    const __m256d x11 = _mm256_loadu_pd(a11 + i);
    const __m256d j = _mm256_fmsub_pd(x00, x11, _mm256_mul_pd(x01, x10));
    if (_mm256_movemask_pd(_mm256_cmp_pd(j, zero, _CMP_LE_OQ)) != 0)
      return std::numeric_limits<double>::infinity();
    __m256d frob = _mm256_mul_pd(x00, x00);
    frob = _mm256_fmadd_pd(x01, x01, frob);
    frob = _mm256_fmadd_pd(x10, x10, frob);
    frob = _mm256_fmadd_pd(x11, x11, frob);
    __m256d w = _mm256_mul_pd(mu, frob);
    w = _mm256_fmadd_pd(half_lambda, _mm256_mul_pd(j, j), w);
    w = _mm256_fnmadd_pd(c_log, log4d(j), w);
    w = _mm256_sub_pd(w, c0);
    acc = _mm256_fmadd_pd(_mm256_loadu_pd(coeff + i), w, acc);
  }
  double sum = hsum4d(acc);
  if (i < n) {
    const double tail = scalar_backend().weighted_energy_sum(
        a00 + i, a01 + i, a10 + i, a11 + i, coeff + i, n - i, p);
    sum += tail;  // +inf propagates
  }
  return sum;
}

void avx2_energy_values(const double* a00, const double* a01,
                        const double* a10, const double* a11, double* out,
                        std::size_t n, const MaterialParams& p) {
  const __m256d mu = _mm256_set1_pd(p.mu);
  const __m256d half_lambda = _mm256_set1_pd(0.5 * p.lambda);
  const __m256d c_log = _mm256_set1_pd(2.0 * p.mu + p.lambda);
  const __m256d c0 = _mm256_set1_pd(2.0 * p.mu + 0.5 * p.lambda);
  const __m256d zero = _mm256_setzero_pd();
  const __m256d inf = _mm256_set1_pd(std::numeric_limits<double>::infinity());

  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d x00 = _mm256_loadu_pd(a00 + i);
    const __m256d x01 = _mm256_loadu_pd(a01 + i);
    const __m256d x10 = _mm256_loadu_pd(a10 + i);
    const __m256d x11 = _mm256_loadu_pd(a11 + i);
    const __m256d j = _mm256_fmsub_pd(x00, x11, _mm256_mul_pd(x01, x10));
    const __m256d bad = _mm256_cmp_pd(j, zero, _CMP_LE_OQ);
    const __m256d j_safe = _mm256_blendv_pd(j, _mm256_set1_pd(1.0), bad);
    __m256d frob = _mm256_mul_pd(x00, x00);
    frob = _mm256_fmadd_pd(x01, x01, frob);
    frob = _mm256_fmadd_pd(x10, x10, frob);
    frob = _mm256_fmadd_pd(x11, x11, frob);
    __m256d w = _mm256_mul_pd(mu, frob);
    w = _mm256_fmadd_pd(half_lambda, _mm256_mul_pd(j_safe, j_safe), w);
    w = _mm256_fnmadd_pd(c_log, log4d(j_safe), w);
    w = _mm256_sub_pd(w, c0);
    _mm256_storeu_pd(out + i, _mm256_blendv_pd(w, inf, bad));
  }
  if (i < n)
    scalar_backend().energy_values(a00 + i, a01 + i, a10 + i, a11 + i, out + i,
                                   n - i, p);
}

double avx2_weighted_energy_and_stress(const double* a00, const double* a01,
                                       const double* a10, const double* a11,
                                       const double* coeff, std::size_t n,
                                       const MaterialParams& p, double* g00,
                                       double* g01, double* g10, double* g11) {
  const __m256d mu = _mm256_set1_pd(p.mu);
  const __m256d two_mu = _mm256_set1_pd(2.0 * p.mu);
  const __m256d lambda = _mm256_set1_pd(p.lambda);
  const __m256d half_lambda = _mm256_set1_pd(0.5 * p.lambda);
  const __m256d c_log = _mm256_set1_pd(2.0 * p.mu + p.lambda);
  const __m256d c0 = _mm256_set1_pd(2.0 * p.mu + 0.5 * p.lambda);
  const __m256d zero = _mm256_setzero_pd();

  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d x00 = _mm256_loadu_pd(a00 + i);
    const __m256d x01 = _mm256_loadu_pd(a01 + i);
    const __m256d x10 = _mm256_loadu_pd(a10 + i);
    const __m256d x11 = _mm256_loadu_pd(a11 + i);
    const __m256d j = _mm256_fmsub_pd(x00, x11, _mm256_mul_pd(x01, x10));
    if (_mm256_movemask_pd(_mm256_cmp_pd(j, zero, _CMP_LE_OQ)) != 0)
      return std::numeric_limits<double>::quiet_NaN();
    __m256d frob = _mm256_mul_pd(x00, x00);
    frob = _mm256_fmadd_pd(x01, x01, frob);
    frob = _mm256_fmadd_pd(x10, x10, frob);
    frob = _mm256_fmadd_pd(x11, x11, frob);
    __m256d w = _mm256_mul_pd(mu, frob);
    w = _mm256_fmadd_pd(half_lambda, _mm256_mul_pd(j, j), w);
    w = _mm256_fnmadd_pd(c_log, log4d(j), w);
    w = _mm256_sub_pd(w, c0);
    const __m256d c = _mm256_loadu_pd(coeff + i);
    acc = _mm256_fmadd_pd(c, w, acc);

    const __m256d gj =
        _mm256_fmsub_pd(lambda, j, _mm256_div_pd(c_log, j));
    _mm256_storeu_pd(g00 + i,
                     _mm256_mul_pd(c, _mm256_fmadd_pd(two_mu, x00,
                                                      _mm256_mul_pd(gj, x11))));
    _mm256_storeu_pd(g01 + i,
                     _mm256_mul_pd(c, _mm256_fnmadd_pd(gj, x10,
                                                       _mm256_mul_pd(two_mu, x01))));
    _mm256_storeu_pd(g10 + i,
                     _mm256_mul_pd(c, _mm256_fnmadd_pd(gj, x01,
                                                       _mm256_mul_pd(two_mu, x10))));
    _mm256_storeu_pd(g11 + i,
                     _mm256_mul_pd(c, _mm256_fmadd_pd(two_mu, x11,
                                                      _mm256_mul_pd(gj, x00))));
  }
  double sum = hsum4d(acc);
  if (i < n) {
    const double tail = scalar_backend().weighted_energy_and_stress(
        a00 + i, a01 + i, a10 + i, a11 + i, coeff + i, n - i, p, g00 + i,
        g01 + i, g10 + i, g11 + i);
    if (std::isnan(tail)) return tail;
    sum += tail;
  }
  return sum;
}

}  // namespace

const Backend& avx2_backend() {
  static const Backend b{avx2_weighted_energy_sum, avx2_energy_values,
                         avx2_weighted_energy_and_stress};
  return b;
}

}  // namespace shapeflow::kern::detail

#endif  // x86
