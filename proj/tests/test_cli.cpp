#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
};

Run run(const std::string& args) {
  const std::string cmd = std::string(CWM_BIN) + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string out;
  char buf[4096];
  while (std::size_t n = fread(buf, 1, sizeof buf, pipe)) out.append(buf, n);
  const int status = pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string fixture(const std::string& name) {
  return (fs::path(CWM_FIXTURE_DIR) / name).string();
}

fs::path scratch() {
  const auto dir = fs::temp_directory_path() / ("cwm_cli_test_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  return dir;
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

}  // namespace

TEST_CASE("winner") {
  const auto r = run("winner " + fixture("randomized_cycle.elec"));
  CHECK(r.code == 0);
  CHECK(r.out.find("a 1/3") != std::string::npos);
  CHECK(run("winner " + fixture("minimal_plurality.elec")).out.find("winners: a") !=
        std::string::npos);
}

TEST_CASE("exit codes") {
  const auto dir = scratch();
  CHECK(run("solve " + fixture("veto_partition_1_1.elec")).code == 0);
  CHECK(run("solve " + fixture("veto_partition_1_3.elec")).code == 0);
  CHECK(run("solve " + fixture("minimal_plurality.elec")).code == 2);
  CHECK(run("solve " + (dir / "missing.elec").string()).code == 2);
  write(dir / "bad.elec", "CANDIDATES\na b\nPROTOCOL\nbordaa\n");
  const auto bad = run("winner " + (dir / "bad.elec").string());
  CHECK(bad.code == 2);
  CHECK(bad.out.find("line 4, column 1: unknown protocol 'bordaa'") != std::string::npos);
  CHECK(run("solve " + fixture("veto_partition_1_1.elec") + " --budget-nodes 2").code == 3);
  CHECK(run("reduce 1 2").code == 2);
  CHECK(run("reduce 1 1 --encoder plurality").code == 2);
  CHECK(run("bogus").code == 2);
  CHECK(run("").code == 2);
}

TEST_CASE("solve and verify") {
  const auto dir = scratch();
  for (const auto& entry : fs::directory_iterator(CWM_FIXTURE_DIR)) {
    const std::string name = entry.path().filename().string();
    std::ifstream in(entry.path());
    std::stringstream ss;
    ss << in.rdbuf();
    if (ss.str().find("MANIPULATION") == std::string::npos) continue;
    CAPTURE(name);
    for (const char* tb : {"pessimistic", "optimistic", "lexicographic"}) {
      const auto w = dir / (name + ".witness");
      fs::remove(w);
      const auto r = run("solve " + entry.path().string() + " --tiebreak " + tb +
                         " --witness-out " + w.string());
      REQUIRE(r.code == 0);
      if (r.out.find("decision: yes") == std::string::npos) {
        CHECK(r.out.find("decision: no") != std::string::npos);
        CHECK(r.out.find("witness:") == std::string::npos);
        continue;
      }
      CHECK(r.out.find("witness:") != std::string::npos);
      const auto v = run("verify " + entry.path().string() + " " + w.string() + " --tiebreak " + tb);
      CHECK(v.code == 0);
      CHECK(v.out.rfind("accepted", 0) == 0);
    }
  }
  write(dir / "wrong.witness", "p,a,b\np,a,b\n");
  const auto v = run("verify " + fixture("veto_partition_1_1.elec") + " " +
                     (dir / "wrong.witness").string());
  CHECK(v.code == 0);
  CHECK(v.out.rfind("rejected", 0) == 0);
  write(dir / "short.witness", "p,a,b\n");
  CHECK(run("verify " + fixture("veto_partition_1_1.elec") + " " + (dir / "short.witness").string())
            .code == 2);
}

TEST_CASE("known decisions through the CLI") {
  const auto yes = [](const std::string& f) {
    return run("solve " + fixture(f)).out.find("decision: yes") != std::string::npos;
  };
  CHECK(yes("veto_partition_1_1.elec"));
  CHECK_FALSE(yes("veto_partition_1_3.elec"));
  CHECK(yes("stv_partition_1_1.elec"));
  CHECK(yes("runoff_partition_1_1.elec"));
  CHECK(yes("plurality_one_manipulator.elec"));
  CHECK_FALSE(yes("plurality_outweighed.elec"));
  CHECK(yes("copeland_three.elec"));
  CHECK_FALSE(yes("copeland_three_no.elec"));
  CHECK(yes("maximin_three.elec"));
  CHECK(yes("borda_destructive.elec"));
  CHECK(yes("randomized_cycle.elec"));
}

TEST_CASE("reduce and sweep") {
  const auto r = run("reduce 3 5 8 --encoder stv");
  CHECK(r.code == 0);
  CHECK(r.out.find("agreement: true") != std::string::npos);
  CHECK(r.out.find("transported witness: accepted") != std::string::npos);
  const auto emitted = scratch() / "emitted.elec";
  CHECK(run("reduce 1 1 --encoder veto --emit " + emitted.string()).code == 0);
  std::ifstream in(emitted);
  std::stringstream text;
  text << in.rdbuf();
  CHECK(text.str().find("PROTOCOL\nveto\n") != std::string::npos);
  CHECK(run("solve " + emitted.string()).out.find("decision: yes") != std::string::npos);
  const auto s = run("sweep --encoder all --t-max 3 --k-max 3 --threads 2");
  CHECK(s.code == 0);
}

TEST_CASE("gen output is a loadable, deterministic file") {
  const auto dir = scratch();
  const auto a = run("gen --seed 9 --m 4 --protocol cup --coalition 2");
  const auto b = run("gen --seed 9 --m 4 --protocol cup --coalition 2");
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
  write(dir / "gen.elec", a.out);
  CHECK(run("solve " + (dir / "gen.elec").string()).code == 0);
  CHECK(run("gen --m 0").code == 2);
}

TEST_CASE("bench CSV") {
  const auto dir = scratch();
  write(dir / "empty.json", "{}");
  const auto empty = run("bench " + (dir / "empty.json").string());
  CHECK(empty.code == 0);
  CHECK(empty.out == "protocol,m,s_weight,t_count,goal,method,decision,wall_time_us,nodes\n");
  write(dir / "cfg.json",
        R"({"protocols": ["veto", "maximin"], "m": [3], "coalition_sizes": [1, 2], "seeds": [1, 2]})");
  const auto one = run("bench " + (dir / "cfg.json").string() + " --threads 1 --no-timing");
  const auto four = run("bench " + (dir / "cfg.json").string() + " --threads 4 --no-timing");
  CHECK(one.code == 0);
  CHECK(one.out == four.out);
  CHECK(std::count(one.out.begin(), one.out.end(), '\n') == 9);
  write(dir / "bad.json", R"({"protocols": "veto"})");
  CHECK(run("bench " + (dir / "bad.json").string()).code == 2);
}
