// One line per acceptance criterion, tolerances pinned below.
#include "berrydiag/verify.hpp"

#include <cstdio>

int main() {
  bd::verify::options o;
  o.seed = 1;
  o.points = 100;
  o.curvature_points = 50;
  o.symbolic_cases = 200;
  o.symbolic_degree = 6;
  o.hbar = 0.1;
  auto& t = o.tol;
  t.oracle = 1e-8;
  t.pauli = 1e-4;
  t.curvature = 1e-8;
  t.helicity = 1e-9;
  t.spin_hall = 1e-9;
  t.energy = 1e-8;
  t.velocity = 1e-8;
  t.slope = 0.1;
  t.free_field = 1e-12;
  t.connections = 1e-6;
  t.round_trip = 1e-12;
  t.rk4_slope = 0.2;
  t.runtime = 10.0;

  int failed = 0;
  for (const auto& name : bd::verify::suite_names()) {
    std::vector<bd::verify::check> cs;
    try {
      cs = bd::verify::run_suite(name, o);
    } catch (const std::exception& e) {
      std::printf("FAIL suite %s raised: %s\n", name.c_str(), e.what());
      ++failed;
      continue;
    }
    for (const auto& c : cs) {
      if (c.diagnostic) {
        std::printf("  diagnostic %-4s %s: %.3e (bound %.1e)\n", c.id.c_str(), c.name.c_str(), c.value, c.tol);
        continue;
      }
      if (!c.pass) ++failed;
      std::string extra = c.detail;
      if (!c.timing.empty()) extra += (extra.empty() ? "" : ", ") + c.timing;
      std::printf("%s criterion %-2s %s: %.3e (bound %.1e)%s%s\n", c.pass ? "PASS" : "FAIL", c.id.c_str(),
                  c.name.c_str(), c.value, c.tol, extra.empty() ? "" : "; ", extra.c_str());
    }
  }
  std::printf("%d criteria failed\n", failed);
  return failed == 0 ? 0 : 1;
}
