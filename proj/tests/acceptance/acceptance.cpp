// Acceptance driver: one PASS/FAIL line per criterion, nonzero exit if any
// criterion fails.

#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "cvtele/validation.hpp"

namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

int sh(const std::string& cmd) {
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

// Two runs of the same sweep config, with different worker counts, must
// produce identical CSV bytes.
cvtele::CheckResult check_determinism() {
  cvtele::CheckResult r;
  r.id = "AC9";
  r.title = "byte-identical CSV from repeated sweeps";
  const auto t0 = std::chrono::steady_clock::now();
  const fs::path dir = fs::temp_directory_path() / ("cvtele_acceptance_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  const fs::path cfg = dir / "sweep.json";
  std::ofstream(cfg) << R"({
  "base": {"G2": 0.25, "G3": 0.2, "gamma2": 0.001, "gamma3": 0.001, "gamma_m": 0.02, "n_m": 10},
  "sweep": "G2", "from": 0.15, "to": 0.35, "steps": 101,
  "filters": {"a2": {"Omega": 0, "tau": 200}, "a3": {"Omega": 0, "tau": 200}},
  "seed": 1
})";
  const std::string exe = CVTELEPORT_EXE;
  const fs::path a = dir / "a.csv", b = dir / "b.csv";
  const int ca = sh("CVTELEPORT_THREADS=1 " + exe + " sweep --config " + cfg.string() + " --out " +
                    a.string() + " 2>/dev/null");
  const int cb = sh("CVTELEPORT_THREADS=4 " + exe + " sweep --config " + cfg.string() + " --out " +
                    b.string() + " 2>/dev/null");
  const std::string x = slurp(a), y = slurp(b);
  r.pass = ca == 0 && cb == 0 && !x.empty() && x == y;
  std::ostringstream s;
  s << "exit codes " << ca << "/" << cb << ", " << x.size() << " vs " << y.size() << " bytes, "
    << (x == y ? "identical" : "different");
  r.detail = s.str();
  fs::remove_all(dir);
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

}  // namespace

int main(int argc, char** argv) {
  const std::uint64_t seed = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 1;
  bool all = true;
  for (const auto& r : cvtele::run_all_checks(seed, 2000)) {
    std::cout << cvtele::format_check(r) << std::endl;
    all = all && r.pass;
  }
  const auto det = check_determinism();
  std::cout << cvtele::format_check(det) << std::endl;
  all = all && det.pass;
  std::cout << (all ? "ALL ACCEPTANCE CRITERIA PASS" : "SOME ACCEPTANCE CRITERIA FAIL") << std::endl;
  return all ? 0 : 1;
}
