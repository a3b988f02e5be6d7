#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "json.hpp"

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Outcome
{
    int code;
    json doc;
    std::string err;
};

Outcome run(std::vector<std::string> args)
{
    std::ostringstream out, err;
    const int code = revmech::cli::run(args, out, err);
    json doc;
    if (!out.str().empty()) {
        doc = json::parse(out.str(), nullptr, false);
    }
    return {code, doc, err.str()};
}

class Workspace
{
public:
    Workspace() : dir_(fs::temp_directory_path() / ("revmech_cli_" + std::to_string(std::rand())))
    {
        fs::create_directories(dir_);
    }
    ~Workspace() { fs::remove_all(dir_); }

    std::string write(const std::string& name, const std::string& text) const
    {
        std::ofstream(dir_ / name) << text;
        return (dir_ / name).string();
    }
    std::string path(const std::string& name) const { return (dir_ / name).string(); }

private:
    fs::path dir_;
};

const char* i1 = R"({"bidders": 2, "items": 1, "feasibility": {"kind": "single_item"},
  "types": [[{"values": ["1/2"], "prob": "1/2"}, {"values": ["1"], "prob": "1/2"}],
            [{"values": ["1/2"], "prob": "1/2"}, {"values": ["1"], "prob": "1/2"}]]})";
const char* i2 = R"({"bidders": 2, "items": 1,
  "feasibility": {"kind": "explicit", "allocations": [[], [[0, 0]], [[1, 0]]]},
  "types": [[{"values": ["1"], "prob": "1"}], [{"values": ["1"], "prob": "1"}]]})";
const char* i3 = R"({"bidders": 1, "items": 1, "feasibility": {"kind": "single_item"}, "budgets": ["1/4"],
  "types": [[{"values": ["1/2"], "prob": "1/2"}, {"values": ["1"], "prob": "1/2"}]]})";

}  // namespace

TEST_CASE("check-rf and brute-force membership")
{
    Workspace ws;
    const auto inst = ws.write("i2.json", i2);
    const auto half = ws.write("half.json", R"(["1/2", "1/2"])");
    const auto big = ws.write("big.json", R"({"reduced_form": [["3/4"], ["3/4"]]})");
    const auto bad = ws.write("bad.json", R"(["1/2"])");

    const auto yes = run({"check-rf", inst, half});
    CHECK(yes.code == 0);
    CHECK(yes.doc["feasible"] == true);
    const auto no = run({"check-rf", inst, big});
    CHECK(no.code == 1);
    CHECK(no.doc["feasible"] == false);
    CHECK(no.doc.contains("witness"));
    CHECK(run({"check-rf", inst, bad}).code == 2);
    CHECK(run({"check-rf", inst, ws.path("missing.json")}).code == 2);
    CHECK(run({"check-rf", ws.write("broken.json", "{"), half}).code == 2);

    for (const auto& rf : {half, big}) {
        CHECK(run({"brute-force", "membership", inst, rf}).code == run({"check-rf", inst, rf}).code);
    }
    CHECK(run({"--max-enum", "1", "brute-force", "membership", ws.write("i1.json", i1), ws.write("q.json", R"(["1/2","1/2","1/2","1/2"])")}).code == 2);
}

TEST_CASE("decompose")
{
    Workspace ws;
    const auto inst = ws.write("i1.json", i1);
    const auto half = run({"decompose", inst, ws.write("half.json", R"(["1/2", "1/2", "1/2", "1/2"])")});
    CHECK(half.code == 0);
    CHECK(half.doc["components"] == 2);
    const auto corner = run({"decompose", inst, ws.write("corner.json", R"(["1", "1", "0", "0"])")});
    CHECK(corner.code == 0);
    CHECK(corner.doc["components"] == 1);
    CHECK(run({"decompose", inst, ws.write("big.json", R"(["1", "1", "1", "1"])")}).code == 1);
}

TEST_CASE("optimize, simulate and brute-force optimize on I3")
{
    Workspace ws;
    const auto inst = ws.write("i3.json", i3);
    const auto mech = ws.path("mech.json");
    const auto exact = run({"optimize", inst, "--epsilon", "1/10", "--delta", "0", "--exact", "--out", mech});
    REQUIRE(exact.code == 0);
    CHECK(exact.doc["expected_revenue"] == "1/2");
    CHECK(exact.doc["metadata"]["mode"] == "exact");
    CHECK(exact.doc["checks"]["ir_ok"] == true);
    CHECK(exact.doc["prices"].contains("raw"));
    CHECK(fs::exists(mech));

    const auto budgeted = run({"optimize", inst, "--epsilon", "1/10", "--delta", "0", "--budgets"});
    CHECK(budgeted.doc["expected_revenue"] == "1/4");
    CHECK(run({"brute-force", "optimize", inst}).doc["revenue"] == "1/2");
    CHECK(run({"brute-force", "optimize", inst, "--budgets"}).doc["revenue"] == "1/4");

    const auto sim = run({"--seed", "5", "simulate", inst, mech, "--trials", "100000"});
    CHECK(sim.code == 0);
    CHECK(std::abs(sim.doc["mean_revenue_decimal"].get<double>() - 0.5) <= 0.02);
    const auto empty = run({"simulate", inst, mech, "--trials", "0"});
    CHECK(empty.code == 0);
    CHECK(empty.doc["bidders"].empty());
    CHECK(!empty.doc.contains("mean_revenue"));

    const std::vector<std::string> sampled{"--seed", "3", "optimize", inst, "--epsilon", "1/2", "--k", "50", "--k-prime", "10"};
    const auto a = run(sampled);
    CHECK(a.code == 0);
    CHECK(a.doc["metadata"]["mode"] == "sampling");
    CHECK(a.doc == run(sampled).doc);
}

TEST_CASE("usage errors")
{
    Workspace ws;
    const auto inst = ws.write("i3.json", i3);
    CHECK(run({}).code == 2);
    CHECK(run({"optimize", inst}).code == 2);
    CHECK(run({"optimize", inst, "--epsilon", "zero"}).code == 2);
    CHECK(run({"optimize", inst, "--epsilon", "-1"}).code == 2);
    CHECK(run({"optimize", inst, "--epsilon", "1/2", "--exact", "--k", "5"}).code == 2);
    CHECK(run({"optimize", ws.write("i2.json", i2), "--epsilon", "1/2", "--budgets"}).code == 2);
    CHECK(run({"proxy", inst, "--k", "1", "--k-prime", "1"}).code == 2);
    CHECK(run({"--help"}).code == 0);
}

TEST_CASE("proxy dump")
{
    Workspace ws;
    const auto inst = ws.write("i1.json", i1);
    const auto dump = run({"--seed", "7", "proxy", inst, "--k", "8", "--k-prime", "1"});
    CHECK(dump.code == 0);
    CHECK(dump.doc["profiles"].size() == 12);
    CHECK(dump.doc["seed"] == 7);
    CHECK(dump.doc == run({"--seed", "7", "proxy", inst, "--k", "8", "--k-prime", "1"}).doc);
}
