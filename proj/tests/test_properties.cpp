#include <gtest/gtest.h>

#include <cctype>
#include <cmath>
#include <string>

#include "convspec/compare.hpp"
#include "convspec/kernels.hpp"
#include "convspec/large_interval.hpp"
#include "convspec/nystrom.hpp"
#include "convspec/small_interval.hpp"

using namespace convspec;

class KernelProperty : public ::testing::TestWithParam<std::string> {
 protected:
  Kernel kern() const { return parse_kernel_spec(GetParam()); }
};

INSTANTIATE_TEST_SUITE_P(Kernels, KernelProperty, ::testing::Values("power32", "cauchy:h=1", "cauchy:h=0.5", "gaussian"),
                         [](const auto& info) {
                           std::string s = info.param;
                           for (char& c : s)
                             if (!std::isalnum(static_cast<unsigned char>(c))) c = '_';
                           return s;
                         });

TEST_P(KernelProperty, AssumptionsHold) { EXPECT_TRUE(validate_assumptions(kern()).all_pass()); }

// The full discrete spectrum sums to the trace a int K(0) dt = 2 a K(0).
TEST_P(KernelProperty, NystromTrace) {
  const Kernel k = kern();
  for (double a : {0.5, 3.0}) {
    const auto sol = nystrom::solve(k, a, 40, 40);
    double s = 0;
    for (double l : sol.lambda) s += l;
    EXPECT_NEAR(s / (2 * a * k.eval(0.0)), 1.0, 1e-12) << a;
  }
}

TEST_P(KernelProperty, NystromSpectrumShape) {
  const Kernel k = kern();
  double prev_top = 0;
  for (double a : {0.5, 2.0, 5.0}) {
    const auto sol = nystrom::solve(k, a, 100, nystrom::default_retained(a));
    EXPECT_LT(sol.lambda[0], k.ft0());
    EXPECT_GT(sol.lambda[0], prev_top);
    prev_top = sol.lambda[0];
    for (std::size_t l = 0; l < sol.size(); ++l) {
      if (sol.below_noise_floor[l]) break;
      EXPECT_GT(sol.lambda[l], 0.0);
      EXPECT_EQ(sol.parity[l], l % 2 == 0 ? Parity::even : Parity::odd) << "a=" << a << " l=" << l;
      if (l > 0) {
        EXPECT_LT(sol.lambda[l], sol.lambda[l - 1]);
      }
    }
    EXPECT_TRUE(compare::interlacing_check(compare::from_nystrom(sol)).ok);
  }
}

TEST_P(KernelProperty, EnergyIdentityForNystromModes) {
  const Kernel k = kern();
  for (double a : {1.0, 4.0}) {
    const auto s = compare::from_nystrom(nystrom::solve(k, a, 100, 6));
    for (const auto& m : s.modes) EXPECT_LT(compare::energy_identity_residual(k, a, m), 1e-3) << a << " " << m.global;
  }
}

TEST_P(KernelProperty, LargeIntervalRootsAreOrderedAndInterlaced) {
  const Kernel k = kern();
  const double a = 5.0;
  const auto s = compare::solve_large(k, a, 5);
  std::vector<double> ke, ko;
  for (const auto* m : s.of_parity(Parity::even)) ke.push_back(m->kappa);
  for (const auto* m : s.of_parity(Parity::odd)) ko.push_back(m->kappa);
  EXPECT_TRUE(compare::interlacing_check(ke, ko).ok);
  for (const auto& m : s.modes) {
    EXPECT_EQ(m.lambda, k.ft(m.kappa));
    EXPECT_GT(m.f(a), 0.0);
  }
}

TEST_P(KernelProperty, LargeIntervalApproachesNystrom) {
  const Kernel k = kern();
  const double a = 5.0;
  const auto ref = compare::from_nystrom(nystrom::solve(k, a, 100, 10));
  const auto rep = compare::build_report(ref, compare::solve_large(k, a, 2), k.name);
  for (const auto& r : rep.rows) {
    EXPECT_LT(r.rel_err, 5e-2) << to_string(r.parity) << r.n;
    EXPECT_LT(r.l2_err, 0.2) << to_string(r.parity) << r.n;
  }
}

TEST_P(KernelProperty, SmallIntervalLeadingPair) {
  const Kernel k = kern();
  const double a = 0.1;
  const auto ref = compare::from_nystrom(nystrom::solve(k, a, 100, 10));
  const auto rep = compare::build_report(ref, compare::from_small(small::solve(k, a, 4)), k.name);
  EXPECT_LT(rep.find(Parity::even, 1)->rel_err, 1e-5);
  EXPECT_LT(rep.find(Parity::odd, 1)->rel_err, 1e-3);
  EXPECT_LT(rep.find(Parity::even, 1)->l2_err, 1e-2);
}

TEST_P(KernelProperty, RayleighBelowTopEigenvalue) {
  const Kernel k = kern();
  const auto sm = small::solve(k, 0.5, 3);
  const auto ny = nystrom::solve(k, 0.5, 80, 3);
  for (std::size_t i = 0; i < sm.size(); ++i) EXPECT_LE(sm.lambda[i], ny.lambda[0] * (1 + 1e-12));
}
