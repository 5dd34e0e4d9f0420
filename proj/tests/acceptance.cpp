// Runs the acceptance criteria and prints one PASS/FAIL line each.
// Usage: acceptance [--suite all|1,4,...] [--seed N] [--workers N] [--out DIR]
#include "epsc/suites.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>

int main(int argc, char** argv) {
  std::string suite = "all", out;
  epsc::SuiteOptions opt;
  for (int i = 1; i + 1 < argc; i += 2) {
    std::string a = argv[i], v = argv[i + 1];
    if (a == "--suite") suite = v;
    else if (a == "--seed") opt.seed = std::stoull(v);
    else if (a == "--workers") opt.workers = std::stoi(v);
    else if (a == "--out") out = v;
    else {
      std::cerr << "unknown flag " << a << "\n";
      return 64;
    }
  }
  int failed = 0;
  auto results = epsc::run_suites(epsc::parse_suite(suite), opt, [&](const epsc::CriterionResult& r) {
    std::cout << epsc::result_line(r) << std::endl;
    if (!r.pass) ++failed;
    if (!out.empty()) {
      std::filesystem::create_directories(out);
      epsc::write_file_atomic(out + "/" + r.name + ".json", epsc::dump(r.report));
      for (const auto& [name, bytes] : r.artifacts) epsc::write_file_atomic(out + "/" + name, bytes);
    }
  });
  std::cout << (results.size() - static_cast<size_t>(failed)) << "/" << results.size() << " criteria passed\n";
  return failed == 0 ? 0 : 1;
}
