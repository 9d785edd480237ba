#include <chrono>
#include <cstdio>
#include <cstdlib>

#include "twinpoint/verify.hpp"

int main(int argc, char** argv) {
  twinpoint::VerifyOptions opt;
  if (argc > 1) opt.seed = std::strtoull(argv[1], nullptr, 10);
  int failed = 0;
  const auto start = std::chrono::steady_clock::now();
  for (const auto& criterion : twinpoint::acceptance_criteria()) {
    const auto t0 = std::chrono::steady_clock::now();
    twinpoint::CriterionResult r;
    try {
      r = criterion.run(opt);
    } catch (const std::exception& e) {
      r = {criterion.id, criterion.name, false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    failed += !r.passed;
    std::printf("criterion %2d %s  %s (%.1fs): %s\n", r.id, r.passed ? "PASS" : "FAIL", r.name.c_str(), secs,
                r.detail.c_str());
    std::fflush(stdout);
  }
  const double total = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::printf("%d of %zu criteria passed in %.1fs\n", static_cast<int>(twinpoint::acceptance_criteria().size()) - failed,
              twinpoint::acceptance_criteria().size(), total);
  return failed == 0 ? 0 : 1;
}
