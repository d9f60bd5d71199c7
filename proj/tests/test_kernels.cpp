#include <doctest.h>

#include <cmath>
#include <vector>

#include "shapeflow/kernels.hpp"
#include "support.hpp"

using namespace shapeflow;
using namespace sftest;

namespace {

struct Batch {
  std::vector<double> a00, a01, a10, a11, coeff;
  std::size_t size() const { return a00.size(); }
};

Batch random_batch(std::size_t n, unsigned seed, double det_lo = 0.05,
                   double det_hi = 20.0) {
  auto g = rng(seed);
  Batch b;
  for (std::size_t i = 0; i < n; ++i) {
    const Matrix2 a = random_positive_matrix(g, det_lo, det_hi);
    b.a00.push_back(a.a00);
    b.a01.push_back(a.a01);
    b.a10.push_back(a.a10);
    b.a11.push_back(a.a11);
    b.coeff.push_back(uniform(g, 0.0, 2.0));
  }
  return b;
}

struct IsaGuard {
  ~IsaGuard() { kern::reset_isa(); }
};

}  // namespace

TEST_CASE("batched energy matches per-matrix evaluation") {
  IsaGuard guard;
  MaterialParams p;
  p.lambda = 1.4;
  p.mu = 0.9;
  const Batch b = random_batch(257, 101);

  for (const kern::Isa isa : {kern::Isa::scalar, kern::Isa::avx2}) {
    if (isa == kern::Isa::avx2 && !kern::avx2_supported()) continue;
    kern::force_isa(isa);
    double expected = 0.0;
    for (std::size_t i = 0; i < b.size(); ++i)
      expected += b.coeff[i] * energy_density(Matrix2(b.a00[i], b.a01[i],
                                                      b.a10[i], b.a11[i]),
                                              p);
    const double got =
        kern::weighted_energy_sum(b.a00.data(), b.a01.data(), b.a10.data(),
                                  b.a11.data(), b.coeff.data(), b.size(), p);
    CHECK(got == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("scalar and avx2 backends agree") {
  if (!kern::avx2_supported()) return;
  IsaGuard guard;
  MaterialParams p;
  p.lambda = 0.7;
  p.mu = 1.8;

  for (unsigned seed : {1u, 2u, 3u}) {
    // stress determinants across many magnitudes
    const Batch b = random_batch(1001, seed, 1e-3, 1e3);

    kern::force_isa(kern::Isa::scalar);
    const double sum_s =
        kern::weighted_energy_sum(b.a00.data(), b.a01.data(), b.a10.data(),
                                  b.a11.data(), b.coeff.data(), b.size(), p);
    std::vector<double> w_s(b.size());
    kern::energy_values(b.a00.data(), b.a01.data(), b.a10.data(), b.a11.data(),
                        w_s.data(), b.size(), p);
    std::vector<double> gs00(b.size()), gs01(b.size()), gs10(b.size()),
        gs11(b.size());
    kern::weighted_energy_and_stress(b.a00.data(), b.a01.data(), b.a10.data(),
                                     b.a11.data(), b.coeff.data(), b.size(), p,
                                     gs00.data(), gs01.data(), gs10.data(),
                                     gs11.data());

    kern::force_isa(kern::Isa::avx2);
    const double sum_v =
        kern::weighted_energy_sum(b.a00.data(), b.a01.data(), b.a10.data(),
                                  b.a11.data(), b.coeff.data(), b.size(), p);
    std::vector<double> w_v(b.size());
    kern::energy_values(b.a00.data(), b.a01.data(), b.a10.data(), b.a11.data(),
                        w_v.data(), b.size(), p);
    std::vector<double> gv00(b.size()), gv01(b.size()), gv10(b.size()),
        gv11(b.size());
    kern::weighted_energy_and_stress(b.a00.data(), b.a01.data(), b.a10.data(),
                                     b.a11.data(), b.coeff.data(), b.size(), p,
                                     gv00.data(), gv01.data(), gv10.data(),
                                     gv11.data());

    CHECK(sum_v == doctest::Approx(sum_s).epsilon(1e-12));
    for (std::size_t i = 0; i < b.size(); ++i) {
      CHECK(w_v[i] == doctest::Approx(w_s[i]).epsilon(1e-11));
      CHECK(gv00[i] == doctest::Approx(gs00[i]).epsilon(1e-11));
      CHECK(gv01[i] == doctest::Approx(gs01[i]).epsilon(1e-11));
      CHECK(gv10[i] == doctest::Approx(gs10[i]).epsilon(1e-11));
      CHECK(gv11[i] == doctest::Approx(gs11[i]).epsilon(1e-11));
    }
  }
}

TEST_CASE("non-positive determinants poison the batch") {
  IsaGuard guard;
  MaterialParams p;
  for (const kern::Isa isa : {kern::Isa::scalar, kern::Isa::avx2}) {
    if (isa == kern::Isa::avx2 && !kern::avx2_supported()) continue;
    kern::force_isa(isa);

    Batch b = random_batch(37, 7);
    b.a00[20] = -b.a00[20];  // flip one determinant
    b.a01[20] = -b.a01[20];
    const double sum =
        kern::weighted_energy_sum(b.a00.data(), b.a01.data(), b.a10.data(),
                                  b.a11.data(), b.coeff.data(), b.size(), p);
    CHECK(std::isinf(sum));

    std::vector<double> w(b.size());
    kern::energy_values(b.a00.data(), b.a01.data(), b.a10.data(), b.a11.data(),
                        w.data(), b.size(), p);
    CHECK(std::isinf(w[20]));
    CHECK(std::isfinite(w[0]));

    std::vector<double> g0(b.size()), g1(b.size()), g2(b.size()), g3(b.size());
    CHECK_THROWS_AS(kern::weighted_energy_and_stress(
                        b.a00.data(), b.a01.data(), b.a10.data(), b.a11.data(),
                        b.coeff.data(), b.size(), p, g0.data(), g1.data(),
                        g2.data(), g3.data()),
                    singular_deformation);
  }
}

TEST_CASE("batched stresses match the analytic gradient") {
  IsaGuard guard;
  MaterialParams p;
  p.lambda = 2.1;
  p.mu = 0.5;
  const Batch b = random_batch(64, 55);
  for (const kern::Isa isa : {kern::Isa::scalar, kern::Isa::avx2}) {
    if (isa == kern::Isa::avx2 && !kern::avx2_supported()) continue;
    kern::force_isa(isa);
    std::vector<double> g0(b.size()), g1(b.size()), g2(b.size()), g3(b.size());
    kern::weighted_energy_and_stress(b.a00.data(), b.a01.data(), b.a10.data(),
                                     b.a11.data(), b.coeff.data(), b.size(), p,
                                     g0.data(), g1.data(), g2.data(), g3.data());
    for (std::size_t i = 0; i < b.size(); ++i) {
      const Matrix2 a(b.a00[i], b.a01[i], b.a10[i], b.a11[i]);
      const Matrix2 expected = energy_density_gradient(a, p) * b.coeff[i];
      const Matrix2 got(g0[i], g1[i], g2[i], g3[i]);
      CHECK((got - expected).max_abs() <=
            1e-11 * (1.0 + expected.max_abs()));
    }
  }
}

TEST_CASE("dispatch reports a valid backend") {
  kern::reset_isa();
  const kern::Isa isa = kern::active_isa();
  CHECK((isa == kern::Isa::scalar || isa == kern::Isa::avx2));
  if (isa == kern::Isa::avx2) CHECK(kern::avx2_supported());
  CHECK(kern::isa_name(isa) != nullptr);
}
