#include <doctest.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

namespace {

struct RunResult {
  int exit_code;
  std::string output;  // stdout + stderr
};

RunResult run(const std::string& args) {
  std::string cmd = std::string(QHT_CLI_PATH) + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string out;
  std::array<char, 4096> buf;
  while (std::size_t got = fread(buf.data(), 1, buf.size(), pipe)) out.append(buf.data(), got);
  int status = pclose(pipe);
  return {WEXITSTATUS(status), out};
}

void write_file(const std::string& path, const std::string& body) {
  std::ofstream f(path);
  REQUIRE(f.good());
  f << body;
}

std::string slurp(const std::string& path) {
  std::ifstream f(path);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("divergence: umegaki on the Bernoulli pair") {
  RunResult r = run("divergence --kind umegaki --P 0.9 --Q 0.2 --base 2");
  CHECK(r.exit_code == 0);
  CHECK(std::stod(r.output) == doctest::Approx(1.652933).epsilon(1e-6));

  write_file("cli_p.json", "{\"probs\": [0.9, 0.1]}\n");
  RunResult same = run("divergence --kind umegaki --rho cli_p.json --sigma cli_p.json");
  CHECK(same.exit_code == 0);
  CHECK(std::abs(std::stod(same.output)) < 1e-12);
}

TEST_CASE("divergence: validation failures exit 2 and name the invariant") {
  write_file("cli_pure.json",
             "{\"dim\": 2, \"matrix\": [[[1,0],[0,0]],[[0,0],[0,0]]]}\n");
  write_file("cli_q.json", "{\"probs\": [0.2, 0.8]}\n");
  RunResult r = run("divergence --kind umegaki --rho cli_pure.json --sigma cli_q.json");
  CHECK(r.exit_code == 2);
  CHECK(r.output.find("RankDeficient") != std::string::npos);

  RunResult unk = run("divergence --kind nonsense --P 0.9 --Q 0.2");
  CHECK(unk.exit_code == 2);

  write_file("cli_bad.json", "{\"dim\": 2, \"matrix\": [[[0.6,0],[0.3,0]],[[0.1,0],[0.4,0]]]}\n");
  RunResult herm = run("divergence --kind umegaki --rho cli_bad.json --sigma cli_q.json");
  CHECK(herm.exit_code == 2);
}

TEST_CASE("region: CSV output, manifest, byte stability") {
  RunResult r = run(
      "region --which deterministic_hoeffding --samples 16 --P 0.9 --Q 0.2 --base 2 --out "
      "cli_region.csv");
  CHECK(r.exit_code == 0);
  std::string body = slurp("cli_region.csv");
  CHECK(body.rfind("x,y\n", 0) == 0);
  double x0 = -1, y0 = -1;
  REQUIRE(std::sscanf(body.c_str() + 4, "%lf,%lf", &x0, &y0) == 2);
  CHECK(x0 == doctest::Approx(0.0));
  CHECK(y0 == doctest::Approx(1.652933).epsilon(1e-6));
  CHECK(slurp("cli_region.csv.manifest.json").find("\"outputs\"") != std::string::npos);

  RunResult again = run(
      "region --which deterministic_hoeffding --samples 16 --P 0.9 --Q 0.2 --base 2 --out "
      "cli_region2.csv");
  CHECK(again.exit_code == 0);
  CHECK(slurp("cli_region2.csv") == body);  // byte-stable

  RunResult bad = run("region --which deterministic_hoeffding --samples 1 --P 0.9 --Q 0.2");
  CHECK(bad.exit_code == 2);

  RunResult sym = run("region --which symmetric --Z 0 --mode maximal --P 0.9 --Q 0.2 --base 2");
  CHECK(sym.exit_code == 0);
  double zx = -1, ey = -1;
  REQUIRE(std::sscanf(sym.output.c_str() + 4, "%lf,%lf", &zx, &ey) == 2);
  CHECK(ey == doctest::Approx(1.652933).epsilon(1e-6));
}

TEST_CASE("simulate-classical: exact flag and budget refusal") {
  RunResult r = run("simulate-classical --P 0.9 --Q 0.2 --n 2000 --mode stein");
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("\"exact\": true") != std::string::npos);
  CHECK(r.output.find("\"base2\"") != std::string::npos);

  write_file("cli_p4.json", "{\"probs\": [0.4, 0.3, 0.2, 0.1]}\n");
  write_file("cli_q4.json", "{\"probs\": [0.1, 0.2, 0.3, 0.4]}\n");
  RunResult refuse = run(
      "simulate-classical --P-file cli_p4.json --Q-file cli_q4.json --n 2000 --mode stein --exact");
  CHECK(refuse.exit_code == 4);
  CHECK(refuse.output.find("budget") != std::string::npos);

  RunResult fallback = run(
      "simulate-classical --P-file cli_p4.json --Q-file cli_q4.json --n 2000 --mode stein "
      "--trials 2000 --seed 7");
  CHECK(fallback.exit_code == 0);
  CHECK(fallback.output.find("\"exact\": false") != std::string::npos);
}

TEST_CASE("simulate-sequential: reproducible JSON") {
  std::string args =
      "simulate-sequential --P 0.9 --Q 0.2 --n 100 --epsilon-bits 0.3 --trials 2000 --seed 24301";
  RunResult a = run(args + " --out cli_seq1.json");
  RunResult b = run(args + " --out cli_seq2.json");
  CHECK(a.exit_code == 0);
  CHECK(b.exit_code == 0);
  std::string ja = slurp("cli_seq1.json");
  // wall-clock differs between runs; compare everything before it
  auto cut = [](const std::string& s) { return s.substr(0, s.find("\"wall_seconds\"")); };
  CHECK(cut(ja) == cut(slurp("cli_seq2.json")));
  CHECK(ja.find("\"A_n\"") != std::string::npos);
  CHECK(ja.find("\"drift\"") != std::string::npos);
  CHECK(ja.find("\"seed\": 24301") != std::string::npos);
}

TEST_CASE("pinching-scan: CSV schema") {
  write_file("cli_rho.json",
             "{\"dim\": 2, \"matrix\": [[[0.5,0],[0.25,0]],[[0.25,0],[0.5,0]]]}\n");
  write_file("cli_sigma.json",
             "{\"dim\": 2, \"matrix\": [[[0.75,0],[0,0]],[[0,0],[0.25,0]]]}\n");
  RunResult r = run("pinching-scan --rho cli_rho.json --sigma cli_sigma.json --s 0.7 --k-max 3");
  CHECK(r.exit_code == 0);
  CHECK(r.output.rfind("k,rate,target,gap,bound\n", 0) == 0);
  int rows = 0;
  for (char ch : r.output)
    if (ch == '\n') ++rows;
  CHECK(rows == 4);  // header + 3 data rows
}

TEST_CASE("verify: unknown suite exits 2, JSON report parses") {
  RunResult r = run("verify --suite bogus");
  CHECK(r.exit_code == 2);

  RunResult j = run("verify --suite pinching --json");
  CHECK(j.exit_code == 0);
  CHECK(j.output.find("\"suite\": \"pinching\"") != std::string::npos);
  CHECK(j.output.find("\"pass\": true") != std::string::npos);
  CHECK(j.output.find("\"measured\"") != std::string::npos);
}
