#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

TEST_SUITE_BEGIN("cli");

namespace {

namespace fs = std::filesystem;

int run_cli(const std::string& args) {
  std::string cmd = std::string(DLAB_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  int rc = std::system(cmd.c_str());
  return WEXITSTATUS(rc);
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

struct TmpDir {
  fs::path path;
  explicit TmpDir(const std::string& name) : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TmpDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("zero replicas still produce a valid header") {
  TmpDir dir("dlab_cli_empty");
  int rc = run_cli("disconnect --replicas 0 --seed 5 --set geometry.n=4 --out " +
                   dir.path.string());
  CHECK(rc == 0);
  std::string csv = slurp(dir.path / "disconnect_samples.csv");
  CHECK(csv.find("config_hash,seed,replica") == 0);
  CHECK(csv.find('\n') == csv.size() - 1);  // header only
}

TEST_CASE("same seed gives byte-identical data files") {
  TmpDir d1("dlab_cli_det1"), d2("dlab_cli_det2");
  std::string base = "disconnect --replicas 4 --seed 11 --set geometry.n=4 --set horizon=2000000";
  CHECK(run_cli(base + " --out " + d1.path.string()) == 0);
  CHECK(run_cli(base + " --out " + d2.path.string()) == 0);
  CHECK(slurp(d1.path / "disconnect_samples.csv") == slurp(d2.path / "disconnect_samples.csv"));
}

TEST_CASE("worker count does not change the output") {
  TmpDir d1("dlab_cli_w1"), d2("dlab_cli_w8");
  std::string base = "record-times --replicas 6 --seed 3 --set geometry.n=4 --set u=0.5";
  CHECK(run_cli(base + " --workers 1 --out " + d1.path.string()) == 0);
  CHECK(run_cli(base + " --workers 8 --out " + d2.path.string()) == 0);
  std::string a = slurp(d1.path / "record_times.csv");
  CHECK(a == slurp(d2.path / "record_times.csv"));
  CHECK(a.find("z_star") != std::string::npos);
}

TEST_CASE("config errors exit with code 2") {
  TmpDir dir("dlab_cli_bad");
  CHECK(run_cli("disconnect --set drift.delta=1.5 --replicas 1 --out " + dir.path.string()) == 2);
  CHECK(run_cli("disconnect --config /nonexistent.json --out " + dir.path.string()) == 2);
  CHECK(run_cli("record-times --set u=-1 --replicas 1 --out " + dir.path.string()) == 2);
}

TEST_CASE("horizon exhaustion on all replicas exits with code 3") {
  TmpDir dir("dlab_cli_horizon");
  int rc = run_cli("disconnect --replicas 2 --seed 1 --set geometry.n=6 --set horizon=10 --out " +
                   dir.path.string());
  CHECK(rc == 3);
}

TEST_CASE("zeta command emits the transform table") {
  TmpDir dir("dlab_cli_zeta");
  CHECK(run_cli("zeta --out " + dir.path.string()) == 0);
  std::string csv = slurp(dir.path / "zeta_laplace.csv");
  CHECK(csv.find("0.89305") != std::string::npos);  // u=1, theta=1
  CHECK(fs::exists(dir.path / "zeta_cdf.csv"));
  CHECK(fs::exists(dir.path / "zeta.meta.json"));
}

TEST_CASE("slt command reports inclusion rates") {
  TmpDir dir("dlab_cli_slt");
  CHECK(run_cli("slt --set runs=40 --set scales=[40,80] --out " + dir.path.string()) == 0);
  std::string csv = slurp(dir.path / "slt_summary.csv");
  CHECK(csv.find("incl_given_event") != std::string::npos);
  // two scale rows beneath the header
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
}

TEST_CASE("config file plus overrides") {
  TmpDir dir("dlab_cli_cfg");
  fs::path cfg = dir.path / "cfg.json";
  std::ofstream(cfg) << R"({"geometry": {"n": 5}, "replicas": 2, "u": 0.5})";
  CHECK(run_cli("record-times --config " + cfg.string() + " --set replicas=3 --out " +
                dir.path.string()) == 0);
  std::string csv = slurp(dir.path / "record_times.csv");
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);  // header + 3 replicas
}

TEST_SUITE_END();
