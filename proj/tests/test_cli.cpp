#include <doctest.h>

#include "treeshift/cli.hpp"
#include "treeshift/io.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace treeshift;
namespace fs = std::filesystem;

namespace {

struct Run
{
	int code;
	std::string out, err;
};

fs::path scratch()
{
	static fs::path dir = [] {
		auto d = fs::temp_directory_path() / "treeshift-cli-tests";
		fs::remove_all(d);
		fs::create_directories(d);
		return d;
	}();
	return dir;
}

Run run(std::vector<std::string> args)
{
	args.push_back("--out");
	args.push_back((scratch() / "report").string());
	std::ostringstream out, err;
	int code = cli::run(args, out, err);
	return {code, out.str(), err.str()};
}

std::string data(const char* name)
{
	return std::string(TREESHIFT_DATA_DIR) + "/" + name;
}

} // namespace

TEST_CASE("analyze command")
{
	auto a = run({"analyze", data("rolewicz-2.json"), "--space", "l2", "--theorem", "rooted-algebra-iv"});
	CHECK(a.code == 0);
	CHECK(a.out.find("ExactDivergence") != std::string::npos);
	auto report = load_json(scratch() / "report.json");
	CHECK(report["verdict"]["kind"] == "ExactDivergence");
	CHECK(fs::exists(scratch() / "report.csv"));

	auto b = run({"analyze", data("binary.json"), data("dyadic-counterexample.json"), "--theorem", "rooted-algebra-iv"});
	CHECK(b.code == 3);
	CHECK(b.out.find("StalledBelow (bound 1)") != std::string::npos);

	CHECK(run({"analyze", data("rolewicz-2.json"), "--theorem", "unrooted-v"}).code == 2);
	CHECK(run({"analyze", data("rolewicz-2.json"), "--theorem", "no-such-theorem"}).code == 2);
	CHECK(run({"analyze", data("rolewicz-2.json")}).code == 2);
	CHECK(run({"analyze", data("missing.json"), "--theorem", "rooted-hc-lp"}).code == 2);

	auto probes = run({"analyze", data("bilateral-rolewicz.json"), "--theorem", "free-left-end", "--probes", "@,@^2",
					   "--horizon", "10"});
	CHECK(probes.code == 0);
	CHECK(load_json(scratch() / "report.json")["probes"] == json::array({"@", "@^2"}));
}

TEST_CASE("witness command")
{
	CHECK(run({"witness", data("rolewicz-2.json"), "--g", R"([["@",1,0]])", "--P", "[1,2]", "--n", "20"}).code == 0);
	CHECK(run({"witness", data("all-ones.json"), "--mode", "unrooted-algebra", "--f", R"([["@",0.5,0]])", "--g",
			   R"([["@.1",1,0]])", "--P", "[1,3]", "--n", "20"})
			  .code == 1);
	CHECK(run({"witness", data("rolewicz-2.json"), "--n", "20"}).code == 2);
	auto small = run({"witness", data("rolewicz-2.json"), "--g", R"([["@",1,0]])", "--f", R"([["@.1.1.1",1,0]])",
					  "--n", "2"});
	CHECK(small.code == 4);
	CHECK(small.out.find("n >= 4") != std::string::npos);
	// Two generators, each given once.
	auto two = run({"witness", data("rolewicz-2.json"), "--P", "[[1,1],[2,1]]", "--f", R"([["@.1",1,0]])", "--f", "[]",
					"--g", R"([["@",1,0]])", "--n", "20"});
	CHECK(two.code == 0);
	auto doc = load_json(scratch() / "report.json");
	CHECK(doc["h"].size() == 2);
	CHECK(doc["success"] == true);
	CHECK(run({"witness", data("rolewicz-2.json"), "--mode", "sideways", "--g", "[]"}).code == 2);
}

TEST_CASE("fertile and gallery commands")
{
	auto f = run({"fertile", data("binary.json")});
	CHECK(f.code == 0);
	CHECK(f.out == "Fertile(@)\n");
	auto s = run({"fertile", data("staircase.json")});
	CHECK(s.code == 1);
	CHECK(s.out == "ProvenNone\n");
	CHECK(run({"fertile", data("free-left-end.json")}).code == 2);
	CHECK(run({"gallery", "nope"}).code == 2);

	// Regeneration writes only where it is told to.
	fs::path expected = scratch() / "expected";
	CHECK(run({"gallery", "menthe", "--regenerate", "--expected-dir", expected.string()}).code == 0);
	CHECK(fs::exists(expected / "menthe.json"));
	CHECK(run({"gallery", "menthe", "--expected-dir", expected.string()}).code == 0);
	auto tampered = load_json(expected / "menthe.json");
	tampered["flat-algebra"]["verdict"] = "ExactDivergence";
	std::ofstream(expected / "menthe.json") << tampered.dump(2);
	auto bad = run({"gallery", "menthe", "--expected-dir", expected.string()});
	CHECK(bad.code == 1);
	CHECK(bad.err.find("flat-algebra/verdict") != std::string::npos);
}
