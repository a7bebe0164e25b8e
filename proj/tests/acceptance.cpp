// Acceptance suite: runs every criterion at its pinned tolerance and prints
// one pass/fail line per criterion.  Criterion 10 (determinism) re-runs the
// whole suite and compares the serialized reports byte for byte.

#include <chrono>
#include <iostream>

#include "introlab/experiments.hpp"

using namespace introlab;

int main(int argc, char** argv) {
  uint64_t seed = 1;
  if (argc > 1) seed = std::strtoull(argv[1], nullptr, 10);
  int failures = 0;
  auto t_start = std::chrono::steady_clock::now();

  json first = run_suite(seed);
  int criterion = 0;
  for (const auto& item : first["criteria"]) {
    ++criterion;
    bool pass = item["pass"].get<bool>();
    std::cout << "criterion " << criterion << " (" << item["experiment"].get<std::string>()
              << "): " << (pass ? "PASS" : "FAIL") << std::endl;
    if (!pass) {
      ++failures;
      std::cout << item["report"].dump(2) << std::endl;
    }
  }

  std::string bytes1 = first.dump(2);
  json second = run_suite(seed);
  std::string bytes2 = second.dump(2);
  bool deterministic = bytes1 == bytes2;
  std::cout << "criterion 10 (determinism): " << (deterministic ? "PASS" : "FAIL")
            << " (suite report " << bytes1.size() << " bytes, two runs "
            << (deterministic ? "identical" : "differ") << ")" << std::endl;
  if (!deterministic) ++failures;

  double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  std::cout << "acceptance total: " << (failures == 0 ? "PASS" : "FAIL") << " ("
            << wall << "s for two full suite runs)" << std::endl;
  return failures == 0 ? 0 : 1;
}
