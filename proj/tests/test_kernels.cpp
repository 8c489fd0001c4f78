#include <doctest.h>

#include <cmath>
#include <cstring>
#include <random>
#include <vector>

#include "sdnr/error.hpp"
#include "sdnr/kernels.hpp"

using namespace sdnr::kernels;

namespace {

std::vector<double> random_vector(std::mt19937_64& rng, std::size_t n) {
  std::normal_distribution<double> d(0.0, 3.0);
  std::vector<double> v(n);
  for (auto& x : v) x = d(rng);
  return v;
}

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

bool same_bits(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

std::vector<Isa> variants() {
  std::vector<Isa> out;
  for (Isa isa : {Isa::avx2, Isa::neon}) {
    if (isa_supported(isa)) out.push_back(isa);
  }
  return out;
}

}  // namespace

TEST_CASE("scalar reference values") {
  const KernelTable& s = *table(Isa::scalar);
  std::vector<double> acc{1.0, 2.0, 3.0};
  const std::vector<double> x{1.0, -2.0, 4.0};
  s.weighted_accumulate(0.5, x.data(), acc.data(), 3);
  CHECK(acc == std::vector<double>{1.5, 1.0, 5.0});
  s.weighted_accumulate_abs(0.5, x.data(), acc.data(), 3);
  CHECK(acc == std::vector<double>{2.0, 2.0, 7.0});
  CHECK(s.max_abs(x.data(), 3) == 4.0);
  CHECK(s.max_abs(x.data(), 0) == 0.0);

  const std::vector<double> a{1, 5, 3, 7, 2}, b{2, 4, 3, 1, 9};
  CHECK(s.sum_of_min(a.data(), b.data(), 5) == 1 + 4 + 3 + 1 + 2);
  std::vector<double> m = a;
  s.min_inplace(m.data(), b.data(), 5);
  CHECK(m == std::vector<double>{1, 4, 3, 1, 2});

  // Two rows, two dims, column-major.
  const std::vector<double> cols{0.0, 3.0, 0.0, 4.0};
  const std::vector<double> point{0.0, 0.0};
  std::vector<double> out(2);
  s.squared_distances(cols.data(), 2, point.data(), 2, out.data());
  CHECK(out == std::vector<double>{0.0, 25.0});
}

TEST_CASE("vector variants are bit-identical to scalar") {
  const KernelTable& s = *table(Isa::scalar);
  std::mt19937_64 rng(99);
  for (Isa isa : variants()) {
    CAPTURE(isa_name(isa));
    const KernelTable& v = *table(isa);
    for (std::size_t n : {0u, 1u, 3u, 4u, 5u, 7u, 8u, 13u, 64u, 257u, 1000u}) {
      CAPTURE(n);
      const auto x = random_vector(rng, n);
      const auto y = random_vector(rng, n);
      auto acc_s = random_vector(rng, n);
      auto acc_v = acc_s;
      s.weighted_accumulate(0.37, x.data(), acc_s.data(), n);
      v.weighted_accumulate(0.37, x.data(), acc_v.data(), n);
      CHECK(same_bits(acc_s, acc_v));
      s.weighted_accumulate_abs(0.61, x.data(), acc_s.data(), n);
      v.weighted_accumulate_abs(0.61, x.data(), acc_v.data(), n);
      CHECK(same_bits(acc_s, acc_v));

      CHECK(same_bits(s.sum_of_min(x.data(), y.data(), n), v.sum_of_min(x.data(), y.data(), n)));
      CHECK(same_bits(s.max_abs(x.data(), n), v.max_abs(x.data(), n)));

      auto ms = x, mv = x;
      s.min_inplace(ms.data(), y.data(), n);
      v.min_inplace(mv.data(), y.data(), n);
      CHECK(same_bits(ms, mv));

      const std::size_t dims = 3;
      const auto cols = random_vector(rng, n * dims);
      const auto point = random_vector(rng, dims);
      std::vector<double> ds(n), dv(n);
      s.squared_distances(cols.data(), n, point.data(), dims, ds.data());
      v.squared_distances(cols.data(), n, point.data(), dims, dv.data());
      CHECK(same_bits(ds, dv));
    }
  }
}

TEST_CASE("dispatch and span wrappers") {
  CHECK(isa_supported(Isa::scalar));
  CHECK(table(Isa::scalar) != nullptr);
  const Isa before = active_isa();
  force_isa(Isa::scalar);
  CHECK(active_isa() == Isa::scalar);
  for (Isa isa : {Isa::avx2, Isa::neon}) {
    if (!isa_supported(isa)) {
      CHECK(table(isa) == nullptr);
      CHECK_THROWS_AS(force_isa(isa), sdnr::ArgumentError);
    }
  }
  force_isa(before);

  std::vector<double> acc(3, 0.0);
  const std::vector<double> x(4, 1.0);
  CHECK_THROWS_AS(weighted_accumulate(1.0, x, acc), sdnr::ArgumentError);
  CHECK_THROWS_AS(sum_of_min(x, acc), sdnr::ArgumentError);
  std::vector<double> out(2);
  const std::vector<double> cols(6, 0.0), point(3, 0.0);
  CHECK_THROWS_AS(squared_distances(cols, 3, point, out), sdnr::ArgumentError);
  CHECK(max_abs(x) == 1.0);
}
