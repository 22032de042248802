#define DOCTEST_CONFIG_IMPLEMENT
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <unistd.h>

namespace {

std::string g_cli;

struct RunResult {
  int exit_code;
  std::string out;
};

RunResult run_cli(const std::string& args) {
  const std::string cmd = g_cli + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string out;
  char buf[4096];
  size_t n;
  while ((n = fread(buf, 1, sizeof(buf), pipe)) > 0) out.append(buf, n);
  const int status = pclose(pipe);
  return {WEXITSTATUS(status), out};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::filesystem::path temp_dir(const std::string& tag) {
  auto p = std::filesystem::temp_directory_path() / ("kitres_test_" + tag + "_" + std::to_string(getpid()));
  std::filesystem::create_directories(p);
  return p;
}

}  // namespace

TEST_CASE("list subcommand") {
  const RunResult human = run_cli("list");
  CHECK(human.exit_code == 0);
  CHECK(human.out.find("fig2a") != std::string::npos);
  CHECK(human.out.find("fig4e") != std::string::npos);

  const RunResult ids = run_cli("list --ids");
  CHECK(ids.exit_code == 0);
  int count = 0;
  std::istringstream ss(ids.out);
  std::string line;
  while (std::getline(ss, line)) {
    ++count;
    CHECK(line.find(' ') == std::string::npos);  // ids only
  }
  CHECK(count >= 8);
}

TEST_CASE("clock-find output") {
  const RunResult r = run_cli("clock-find --lower 4,0 --upper 5,-1 --b-lo 0.010 --b-hi 0.040");
  CHECK(r.exit_code == 0);
  double b = 0, f = 0;
  CHECK(sscanf(r.out.c_str(), "B_CT = %lf T\nf_CT = %lf Hz", &b, &f) == 2);
  CHECK(b > 0.020);
  CHECK(b < 0.030);
  CHECK(std::abs(f - 7.3382e9) < 2e6);
}

TEST_CASE("spectrum CSV on stdout") {
  const RunResult r = run_cli("spectrum --bz 0.0256 --kind esr");
  CHECK(r.exit_code == 0);
  CHECK(r.out.rfind("Bz_T,F_lower,m_lower,F_upper,m_upper,freq_Hz,dipole,dfdB_Hz_per_T", 0) == 0);
}

TEST_CASE("run scenario with pump-delay override") {
  const auto dir = temp_dir("fig2f");
  const RunResult r = run_cli("--out " + dir.string() + " run fig2f --pump-delay 2e-6");
  CHECK(r.exit_code == 0);
  bool found = false;
  for (const auto& e : std::filesystem::directory_iterator(dir))
    if (e.path().extension() == ".csv") found = true;
  CHECK(found);
  // metadata sidecar present
  CHECK(std::filesystem::exists(dir / "fig2f_ringdown.meta"));
  CHECK(slurp(dir / "fig2f_ringdown.meta").find("figure = 2f") != std::string::npos);
  std::filesystem::remove_all(dir);
}

TEST_CASE("error contracts: exit codes") {
  const RunResult missing = run_cli("--config /nonexistent/path.ini run fig2a");
  CHECK(missing.exit_code == 2);
  CHECK(missing.out.find("/nonexistent/path.ini") != std::string::npos);

  const RunResult unknown = run_cli("run figXX");
  CHECK(unknown.exit_code == 2);

  const RunResult bad_override = run_cli("--set nosuch.key=1 list");
  CHECK(bad_override.exit_code == 2);

  // numerical failure: bias beyond the critical current
  const RunResult numeric = run_cli("--set circuit.bias_a=0.02 run fig2c");
  CHECK(numeric.exit_code == 3);
}

TEST_CASE("run determinism: byte-identical outputs") {
  const auto d1 = temp_dir("det1");
  const auto d2 = temp_dir("det2");
  CHECK(run_cli("--out " + d1.string() + " run fig4e").exit_code == 0);
  CHECK(run_cli("--out " + d2.string() + " run fig4e").exit_code == 0);
  CHECK(slurp(d1 / "fig4e_endor.csv") == slurp(d2 / "fig4e_endor.csv"));
  CHECK(!slurp(d1 / "fig4e_endor.csv").empty());
  std::filesystem::remove_all(d1);
  std::filesystem::remove_all(d2);
}

TEST_CASE("config file round trip") {
  const auto dir = temp_dir("cfg");
  const auto cfg = dir / "device.ini";
  {
    std::ofstream out(cfg);
    out << "[ensemble]\n";
    out << "t2 = 0.30   # shorter coherence\n";
  }
  const RunResult r = run_cli("--config " + cfg.string() + " echo --tau 0.15");
  CHECK(r.exit_code == 0);
  double amp = 0;
  const auto pos = r.out.find("echo_amplitude = ");
  REQUIRE(pos != std::string::npos);
  amp = std::stod(r.out.substr(pos + 17));
  CHECK(std::abs(amp - std::exp(-0.3 / 0.3)) < 1e-6);
  std::filesystem::remove_all(dir);
}

TEST_CASE("fit subcommand round trip") {
  const auto dir = temp_dir("fit");
  const auto csv = dir / "s11.csv";
  CHECK(run_cli("s11 --f0 7.422e9 --kappa-c 9.4e4 --kappa-i 7.5e5 --output " + csv.string()).exit_code ==
        0);
  const RunResult r = run_cli("fit --model resonance --input " + csv.string());
  CHECK(r.exit_code == 0);
  const auto pos = r.out.find("kappa_c = ");
  REQUIRE(pos != std::string::npos);
  const double kc = std::stod(r.out.substr(pos + 10));
  CHECK(std::abs(kc - 9.4e4) < 1.0);
  std::filesystem::remove_all(dir);
}

int main(int argc, char** argv) {
  if (argc < 2) {
    std::fprintf(stderr, "usage: test_cli <path-to-kitres-binary> [doctest args]\n");
    return 1;
  }
  g_cli = argv[1];
  doctest::Context ctx;
  ctx.applyCommandLine(argc - 1, argv + 1);
  return ctx.run();
}
