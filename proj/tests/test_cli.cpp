// End-to-end tests of the installed command line: schemas, exit codes,
// formats, cache behavior.  The binary path comes from $CLASSFORGE_BIN
// (set by the test harness) with a build-time fallback.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <gmpxx.h>
#include <sys/file.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <cstdlib>
#include <fcntl.h>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#ifndef CLASSFORGE_DEFAULT_BIN
#define CLASSFORGE_DEFAULT_BIN "classforge"
#endif

using nlohmann::json;

namespace {

std::string cli_path() {
  const char* env = std::getenv("CLASSFORGE_BIN");
  return env && *env ? env : CLASSFORGE_DEFAULT_BIN;
}

struct RunResult {
  int code = -1;
  std::string out;
};

// `extra` is prepended to the command, e.g. an environment assignment
RunResult run(const std::string& args, const std::string& extra = "") {
  RunResult r;
  std::string cmd = extra + " \"" + cli_path() + "\" " + args + " 2>/dev/null";
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  char buf[4096];
  std::size_t k;
  while ((k = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, k);
  int st = pclose(p);
  if (WIFEXITED(st)) r.code = WEXITSTATUS(st);
  return r;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

struct TempPath {
  std::string path;
  explicit TempPath(const std::string& stem)
      : path("/tmp/" + stem + "_" + std::to_string(getpid())) {
    std::remove(path.c_str());
  }
  ~TempPath() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("reports are canonical JSON with sorted keys and string numbers") {
  const char* cmds[] = {
      "torsion --a 0 --b 1",
      "classgroup --d -23",
      "cubic --m 17",
      "specialize --d -26 --u 1 --w 3 --p 3",
      "descent --n 17 --search-bound 50",
      "scan --n 1 --l 2 --m-from 2 --m-to 6",
      "scan-cubic --from 2 --to 8",
      "audit",
  };
  for (const char* cmd : cmds) {
    CAPTURE(cmd);
    RunResult r = run(cmd);
    CHECK(r.code == 0);
    json j = json::parse(r.out);  // throws (fails the test) on bad output
    // nlohmann objects iterate in sorted key order, so a reserialization
    // must reproduce the bytes exactly if and only if they were canonical
    CHECK(j.dump(2) + "\n" == r.out);
  }
}

TEST_CASE("torsion output") {
  json j = json::parse(run("torsion --a 0 --b 1").out);
  CHECK(j["command"] == "torsion");
  CHECK(j["curve"] == json{{"a", "0"}, {"b", "1"}});
  CHECK(j["order"] == "6");
  CHECK(j["structure"] == json::array({"6"}));
  REQUIRE(j["affine_points"].size() == 5);
  CHECK(j["affine_points"][0] == json{{"x", "-1"}, {"y", "0"}});
  CHECK(j["generators"].size() == 1);

  json big = json::parse(run("torsion --a 0 --b 17").out);
  CHECK(big["order"] == "1");
  CHECK(big["structure"] == json::array());
  CHECK(big["affine_points"].empty());
}

TEST_CASE("classgroup output") {
  json j = json::parse(run("classgroup --d -23").out);
  CHECK(j["command"] == "classgroup");
  CHECK(j["d"] == "-23");
  CHECK(j["discriminant"] == "-23");
  CHECK(j["h"] == "3");
  CHECK(j["structure"] == json::array({"3"}));
  REQUIRE(j["reduced_forms"].size() == 3);
  CHECK(j["reduced_forms"][0] == json{{"a", "1"}, {"b", "1"}, {"c", "6"}});

  json k = json::parse(run("classgroup --d -26").out);
  CHECK(k["discriminant"] == "-104");
  CHECK(k["h"] == "6");
  CHECK(k["structure"] == json::array({"6"}));
}

TEST_CASE("cubic output") {
  json j = json::parse(run("cubic --m 17").out);
  CHECK(j["command"] == "cubic");
  CHECK(j["m"] == "17");
  CHECK(j["index_three"] == true);  // 17 = -1 mod 9
  CHECK(j["discriminant"] == "-867");
  CHECK(j["h"] == "1");
  for (const auto& entry : j["factor_base"]) {
    unsigned long ef = 0;
    for (const auto& pr : entry["primes"])
      ef += std::stoul(pr["e"].get<std::string>()) *
            std::stoul(pr["f"].get<std::string>());
    CHECK(ef == 3);
  }

  json k = json::parse(run("cubic --m 7").out);
  CHECK(k["index_three"] == false);
  CHECK(k["discriminant"] == "-1323");
  CHECK(k["structure"] == json::array({"3"}));
}

TEST_CASE("specialize output") {
  json j = json::parse(run("specialize --d -26 --u 1 --w 3 --p 3").out);
  CHECK(j["command"] == "specialize");
  CHECK(j["class"] == json{{"a", "3"}, {"b", "2"}, {"c", "9"}});
  CHECK(j["order"] == "3");
  CHECK(j["h"] == "6");

  json k = json::parse(run("specialize --d -7 --u 1 --w 2 --p 3").out);
  CHECK(k["order"] == "1");
}

TEST_CASE("descent output") {
  RunResult r = run("descent --n 17 --search-bound 100");
  json j = json::parse(r.out);
  CHECK(j["command"] == "descent");
  CHECK(j["f2_rank"] == "2");
  CHECK(j["subgroup_order"] == "4");
  CHECK(j["subgroup"] == "lower-bound subgroup");
  CHECK(j["points"].size() == 18);
  CHECK(j["class_rows"].size() == 18);
  // matrix rows are fixed-width bit strings over the documented columns
  std::size_t width = j["parity_columns"].size() + 1 +
                      std::stoul(j["unit_columns"].get<std::string>());
  for (const auto& row : j["matrix"]) {
    const std::string& bits = row.get_ref<const std::string&>();
    CHECK(bits.size() == width);
    CHECK(bits.find_first_not_of("01") == std::string::npos);
  }
  for (const auto& row : j["class_rows"]) CHECK(row["order"] == "1");

  CHECK(run("descent --n 17 --search-bound 100").out == r.out);
}

TEST_CASE("scan output in both formats") {
  json j = json::parse(run("scan --n 1 --l 2 --m-from 2 --m-to 5").out);
  CHECK(j["command"] == "scan");
  REQUIRE(j["rows"].size() == 4);
  CHECK(j["rows"][0]["m"] == "2");
  CHECK(j["rows"][0]["d"] == "-7");
  CHECK(j["rows"][0]["h"] == "1");
  CHECK(j["rows"][0]["l_rank"] == "0");
  CHECK(j["rows"][0]["specialization"] ==
        json{{"order", "1"}, {"u", "3"}, {"w", "4"}});
  CHECK(j["rows"][1]["m"] == "3");
  CHECK(j["rows"][1]["l_rank"] == "1");
  CHECK(j["rows"][1]["divisors"] == json::array({"6"}));
  CHECK(j["rows"][1]["specialization"] == "n/a");  // 26 splits no square pair
  CHECK(j["rows"][3]["specialization"] == "n/a");  // refused norm-power ideal
  CHECK(j["summary"]["verdict"] == "not constant");
  CHECK(j["summary"]["counterexamples"] == json::array({"3"}));
  CHECK(j["excluded"] == json::array());

  RunResult csv = run("scan --n 1 --l 2 --m-from 2 --m-to 5 --format csv");
  CHECK(csv.code == 0);
  std::istringstream lines(csv.out);
  std::string line;
  std::getline(lines, line);
  CHECK(line ==
        "m,raw,d,discriminant,h,divisors,l_rank,status,spec_u,spec_w,"
        "spec_order");
  std::getline(lines, line);
  CHECK(line == "2,-7,-7,-7,1,,0,ok,3,4,1");
  int data_lines = 1;
  while (std::getline(lines, line)) {
    if (!line.empty()) ++data_lines;
  }
  CHECK(data_lines == 4);
}

TEST_CASE("scan-cubic output") {
  json j = json::parse(run("scan-cubic --from 2 --to 8").out);
  CHECK(j["command"] == "scan-cubic");
  REQUIRE(j["rows"].size() == 7);
  CHECK(j["rows"][2]["status"] == "skipped");  // n = 4 is not squarefree
  CHECK(j["rows"][2]["reason"] == "not-squarefree");
  CHECK(j["rows"][5]["n"] == "7");
  CHECK(j["rows"][5]["h"] == "3");
  CHECK(j["rows"][5]["rank3"] == "1");
  CHECK(j["summary"]["verdict"] == "not constant");
}

TEST_CASE("audit output") {
  json j = json::parse(run("audit").out);
  CHECK(j["command"] == "audit");
  REQUIRE(j["entries"].size() == 5);
  for (const auto& e : j["entries"]) {
    CHECK(e.contains("claim"));
    CHECK(e.contains("where"));
    CHECK(e.contains("stated"));
    CHECK(e.contains("computed"));
    CHECK((e["status"] == "match" || e["status"] == "mismatch" ||
           e["status"] == "not-comparable"));
  }
  CHECK(j["entries"][0]["id"] == "torsion-order-8");
  CHECK(j["entries"][0]["status"] == "mismatch");
}

TEST_CASE("exit codes") {
  CHECK(run("--help").code == 0);
  CHECK(run("").code == 2);                    // missing subcommand
  CHECK(run("bogus").code == 2);               // unknown subcommand
  CHECK(run("torsion --a 0").code == 2);       // missing required flag
  CHECK(run("torsion --a x --b 1").code == 2); // not an integer
  CHECK(run("classgroup --d -12").code == 2);  // not squarefree
  CHECK(run("classgroup --d 5").code == 2);    // not imaginary
  CHECK(run("cubic --m 0").code == 2);
  CHECK(run("specialize --d -26 --u 1 --w 3 --p 4").code == 2);  // p not prime
  CHECK(run("descent --n 12 --search-bound 10").code == 2);  // reducible cubic
  CHECK(run("descent --n 17 --search-bound 0").code == 2);
  CHECK(run("scan --n 1 --l 4 --m-from 2 --m-to 5").code == 2);  // l not prime
  CHECK(run("scan --n 1 --l 2 --m-from 5 --m-to 2").code == 2);  // reversed
  CHECK(run("scan --n 1 --l 2 --m-from 2 --m-to 5 --format xml").code == 2);
  CHECK(run("torsion --a 0 --b 1 --budget 0").code == 2);
  CHECK(run("torsion --a 0 --b 1 --budget -5").code == 2);
  CHECK(run("classgroup --d -104729104729 --budget 100").code == 3);
}

TEST_CASE("budget exhaustion inside a scan keeps rows as skipped") {
  json j = json::parse(run("scan --n 1 --l 2 --m-from 2 --m-to 5 --budget 5").out);
  REQUIRE(j["rows"].size() == 4);
  for (const auto& row : j["rows"]) {
    CHECK(row["status"] == "skipped");
    CHECK(row["reason"] == "work-budget");
  }
  CHECK(j["summary"]["verdict"] == "vacuous");
}

TEST_CASE("--out writes the same bytes the bare run prints") {
  TempPath out("classforge_scan_out");
  RunResult direct = run("scan --n 1 --l 3 --m-from 2 --m-to 6");
  RunResult filed =
      run("scan --n 1 --l 3 --m-from 2 --m-to 6 --out " + out.path);
  CHECK(filed.code == 0);
  CHECK(filed.out.empty());
  CHECK(slurp(out.path) == direct.out);
}

TEST_CASE("cache reuse is byte-identical and keyed by the request") {
  TempPath cache("classforge_cli_cache");
  RunResult cold = run("classgroup --d -23 --cache " + cache.path);
  RunResult warm = run("classgroup --d -23 --cache " + cache.path);
  RunResult bare = run("classgroup --d -23");
  CHECK(cold.code == 0);
  CHECK(warm.code == 0);
  CHECK(cold.out == warm.out);
  CHECK(cold.out == bare.out);

  run("torsion --a 0 --b 1 --cache " + cache.path);
  json stored = json::parse(slurp(cache.path));
  CHECK(stored.size() == 2);
  CHECK(stored.contains("classgroup --d -23"));
  CHECK(stored.contains("torsion --a 0 --b 1"));
  CHECK(stored["classgroup --d -23"] == cold.out);

  // the key is built from parsed values, so a rephrased flag still hits
  RunResult rephrased = run("classgroup --d=-23 --cache " + cache.path);
  CHECK(rephrased.out == cold.out);
  CHECK(json::parse(slurp(cache.path)).size() == 2);
}

TEST_CASE("cache file is honored through the environment variable") {
  TempPath cache("classforge_env_cache");
  RunResult r = run("classgroup --d -7", "CLASSFORGE_CACHE=" + cache.path);
  CHECK(r.code == 0);
  CHECK(json::parse(slurp(cache.path)).contains("classgroup --d -7"));
}

TEST_CASE("corrupt or busy cache files are refused") {
  TempPath cache("classforge_bad_cache");
  {
    std::ofstream(cache.path) << "not json";
  }
  CHECK(run("classgroup --d -23 --cache " + cache.path).code == 2);

  {
    std::ofstream(cache.path) << "{}";
  }
  int fd = open(cache.path.c_str(), O_RDWR);
  REQUIRE(fd >= 0);
  REQUIRE(flock(fd, LOCK_EX) == 0);
  CHECK(run("classgroup --d -23 --cache " + cache.path).code == 2);
  flock(fd, LOCK_UN);
  close(fd);
  CHECK(run("classgroup --d -23 --cache " + cache.path).code == 0);
}
