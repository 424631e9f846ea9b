#include "commands.hpp"
#include "invlab/bounds.hpp"
#include "invlab/constructions.hpp"
#include "invlab/io.hpp"

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <sstream>

using namespace invlab;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code;
  std::string out, err;
  io::Json doc() const { return io::Json::parse(out); }
};

Outcome invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "invlab");
  std::ostringstream out, err;
  int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch() {
  fs::path dir = fs::temp_directory_path() / "invlab_test_cli";
  fs::create_directories(dir);
  return dir;
}

std::string put(const std::string& name, const io::Json& doc) {
  fs::path p = scratch() / name;
  io::write_text(p, doc.dump());
  return p.string();
}

struct Files {
  std::string task, t1, t2a, tight_task, tight_t1, tight_t2;
};

Files files() {
  FigureSetup f = figure_task_and_models();
  TightnessSetup ts = tightness_mdp(0.9, 0.5);
  return {put("task.json", io::to_json(f.task)),          put("t1.json", io::to_json(f.t1)),
          put("t2a.json", io::to_json(f.t2a)),            put("tight_task.json", io::to_json(ts.task)),
          put("tight_t1.json", io::to_json(ts.t1)),       put("tight_t2.json", io::to_json(ts.t2))};
}

}  // namespace

TEST_CASE("analyze on the figure pair") {
  Files f = files();
  Outcome r = invoke({"analyze", "--task", f.task, "--t1", f.t1, "--t2", f.t2a, "--family", "theta"});
  REQUIRE(r.code == 0);
  auto res = r.doc()["result"];
  CHECK(res["classification"]["verdict"] == "Trivial");
  CHECK(res["bounds"]["delta"].get<double>() == doctest::Approx(0.40));
  CHECK(res["bounds"]["eps_star"].get<double>() == doctest::Approx(7.83).epsilon(1e-3));
  CHECK(r.doc()["manifest"]["inputs"].size() == 3);
}

TEST_CASE("analyze on identical files") {
  Files f = files();
  Outcome r = invoke({"analyze", "--task", f.task, "--t1", f.t1, "--t2", f.t1});
  REQUIRE(r.code == 0);
  CHECK(r.doc()["result"]["classification"]["verdict"] == "Equivalent");
  CHECK(r.doc()["result"]["bounds"]["delta"].get<double>() == 0.0);
}

TEST_CASE("analyze and gap on the tightness pair") {
  Files f = files();
  const double b = sim_bound(0.9, 0.5);
  Outcome r = invoke({"analyze", "--task", f.tight_task, "--t1", f.tight_t1, "--t2", f.tight_t2});
  REQUIRE(r.code == 0);
  auto cls = r.doc()["result"]["classification"];
  CHECK(cls["verdict"] == "Exploitable");
  CHECK(cls["witness"]["margin_1"].get<double>() == doctest::Approx(b).epsilon(1e-9));
  CHECK(cls["witness"]["margin_2"].get<double>() == doctest::Approx(b).epsilon(1e-9));

  Outcome g = invoke({"gap", "--task", f.tight_task, "--t1", f.tight_t1, "--t2", f.tight_t2, "--family",
                      "deterministic"});
  REQUIRE(g.code == 0);
  CHECK(g.doc()["result"]["gap"].get<double>() == doctest::Approx(8.18182).epsilon(1e-6));
}

TEST_CASE("horizon single point and grid") {
  Outcome r = invoke({"horizon", "--eps", "1", "--delta", "1"});
  REQUIRE(r.code == 0);
  CHECK(r.doc()["result"]["H"].get<double>() == doctest::Approx(2.0).epsilon(1e-12));

  Outcome g = invoke({"horizon", "--grid", "3"});
  REQUIRE(g.code == 0);
  std::istringstream lines(g.out);
  std::string line;
  int count = 0;
  while (std::getline(lines, line)) ++count;
  CHECK(count == 10);
  CHECK(g.out.rfind("eps,delta,H\n", 0) == 0);

  CHECK(invoke({"horizon", "--eps", "1"}).code == 2);
  CHECK(invoke({"horizon", "--eps", "-1", "--delta", "0.5"}).code == 2);
}

TEST_CASE("reproduce table and figures") {
  fs::path dir = scratch() / "repro";
  REQUIRE(invoke({"reproduce", "table", "--outdir", dir.string()}).code == 0);
  std::string table = io::read_text(dir / "table.csv");
  CHECK(table.find("\na,0.40000000000000002,") != std::string::npos);
  CHECK(table.find("\nb,0.14000000000000001,") != std::string::npos);
  CHECK(table.find("\nc,NA,") != std::string::npos);

  REQUIRE(invoke({"reproduce", "figures", "--outdir", dir.string()}).code == 0);
  CHECK(fs::exists(dir / "panel_a.csv"));
  CHECK(fs::exists(dir / "panel_b.csv"));
  CHECK(fs::exists(dir / "horizon_contour.csv"));
  CHECK(fs::exists(dir / "manifest_figures.json"));

  CHECK(invoke({"reproduce", "movies", "--outdir", dir.string()}).code == 2);
}

TEST_CASE("input errors exit with code 2 and distinct messages") {
  Files f = files();
  Outcome missing = invoke({"analyze", "--task", "/nonexistent/task.json", "--t1", f.t1, "--t2", f.t1});
  CHECK(missing.code == 2);
  CHECK(missing.err.find("cannot open") != std::string::npos);

  fs::path junk = scratch() / "junk.json";
  io::write_text(junk, "{not json");
  Outcome parse = invoke({"analyze", "--task", junk.string(), "--t1", f.t1, "--t2", f.t1});
  CHECK(parse.code == 2);
  CHECK(parse.err.find("parse failure") != std::string::npos);

  io::Json bad = io::to_json(figure_task_and_models().task);
  bad["gamma"] = 1.5;
  Outcome invalid = invoke({"analyze", "--task", put("bad.json", bad), "--t1", f.t1, "--t2", f.t1});
  CHECK(invalid.code == 2);
  CHECK(invalid.err.find("gamma") != std::string::npos);

  Outcome shape = invoke({"analyze", "--task", f.tight_task, "--t1", f.t1, "--t2", f.t1});
  CHECK(shape.code == 2);

  CHECK(invoke({"analyze", "--task", f.task}).code == 2);
  CHECK(invoke({"frobnicate"}).code == 2);
  CHECK(invoke({"--help"}).code == 0);
}

TEST_CASE("search output is deterministic") {
  Outcome a = invoke({"search", "--seed", "7", "--trials", "100"});
  Outcome b = invoke({"search", "--seed", "7", "--trials", "100"});
  REQUIRE(a.code == 0);
  CHECK(a.doc()["result"].dump() == b.doc()["result"].dump());
  CHECK(a.doc()["manifest"]["seeds"]["search"] == 7);
}

TEST_CASE("gradient csv") {
  Files f = files();
  Outcome r = invoke({"gradient", "--task", f.task, "--t", f.t1, "--theta", "0.5"});
  REQUIRE(r.code == 0);
  CHECK(r.out.rfind("state,action,value\n", 0) == 0);
  CHECK(invoke({"gradient", "--task", f.task, "--t", f.t1}).code == 2);
}
