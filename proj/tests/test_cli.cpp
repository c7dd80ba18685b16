#include <doctest.h>

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "vatsp/instance.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
    int code = -1;
    std::string out;
};

std::string cli() {
    const char* p = std::getenv("VATSP_CLI");
    REQUIRE_MESSAGE(p, "VATSP_CLI must point at the binary");
    return p;
}

Run run(const std::string& args) {
    Run r;
    const std::string cmd = cli() + " " + args + " 2>/dev/null";
    FILE* f = popen(cmd.c_str(), "r");
    REQUIRE(f);
    char buf[4096];
    for (std::size_t n; (n = fread(buf, 1, sizeof buf, f)) > 0;) r.out.append(buf, n);
    const int status = pclose(f);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

fs::path scratch() {
    static fs::path dir = [] {
        fs::path d = fs::temp_directory_path() / ("vatsp_cli_" + std::to_string(::getpid()));
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

std::string write_file(const std::string& name, const std::string& text) {
    fs::path p = scratch() / name;
    std::ofstream(p) << text;
    return p.string();
}

std::string gen(const std::string& name, const std::string& args) {
    Run r = run("gen " + args);
    REQUIRE(r.code == 0);
    return write_file(name, r.out);
}

// Writes the command's output to a file and returns its path.
std::string produce(const std::string& name, const std::string& args, int expect = 0) {
    fs::path p = scratch() / name;
    Run r = run(args + " --out " + p.string());
    INFO(args);
    REQUIRE(r.code == expect);
    return p.string();
}

bool contains(const std::string& s, const std::string& part) { return s.find(part) != std::string::npos; }

}  // namespace

TEST_CASE("gen is deterministic and round-trips") {
    Run a = run("gen --seed 1 --n 8 --p 1");
    Run b = run("--seed 1 gen --n 8 --p 1");
    REQUIRE(a.code == 0);
    CHECK(a.out == b.out);
    CHECK(run("gen --seed 2 --n 8 --p 1").out != a.out);
    std::istringstream is(a.out);
    auto inst = vatsp::read_instance(is);
    CHECK(vatsp::validate(inst).empty());
    CHECK(vatsp::instance_to_string(inst) == a.out);
    const std::string path = write_file("gen.txt", a.out);
    CHECK(run("verify " + path).code == 0);
}

TEST_CASE("lp output verifies against the instance") {
    const std::string inst = gen("lp_inst.txt", "--seed 3 --n 8 --p 1");
    const std::string lp = produce("lp.txt", "lp --cuts-log " + inst);
    Run v = run("verify " + inst + " " + lp);
    CHECK(v.code == 0);
    CHECK(contains(v.out, "check all-cuts ok"));
    CHECK(contains(v.out, "check optimal ok"));
    // A tampered objective is caught.
    std::ifstream in(lp);
    std::stringstream text;
    text << in.rdbuf();
    std::string bad = text.str();
    const auto at = bad.find("objective ");
    bad.replace(at, bad.find('\n', at) - at, "objective 1000000");
    CHECK(run("verify " + inst + " " + write_file("lp_bad.txt", bad)).code == 1);
}

TEST_CASE("vortex walk: dp, oracle and diff") {
    const std::string inst = gen("vw_inst.txt", "--seed 4 --n 9 --p 2");
    CHECK(run("vortex-walk --diff " + inst).code == 0);
    const std::string dp = produce("vw.txt", "vortex-walk " + inst);
    const std::string orc = produce("vw_oracle.txt", "vortex-walk --oracle " + inst);
    CHECK(run("verify " + inst + " " + dp).code == 0);
    CHECK(run("verify " + inst + " " + orc).code == 0);
}

TEST_CASE("oracle and tour artifacts verify") {
    const std::string inst = gen("tour_inst.txt", "--seed 5 --n 8 --a 1 --p 1");
    CHECK(run("verify " + inst + " " + produce("oracle.txt", "oracle " + inst)).code == 0);
    const std::string tour = produce("tour.txt", "tour --compare-oracle " + inst);
    Run v = run("verify " + inst + " " + tour);
    CHECK(v.code == 0);
    CHECK(contains(v.out, "check ledger-identity ok"));
    std::ifstream in(tour);
    std::stringstream text;
    text << in.rdbuf();
    CHECK(contains(text.str(), "ratio "));
    CHECK(contains(text.str(), "certificate thin-subgraph"));
}

TEST_CASE("thin modes produce verifiable certificates") {
    const std::string apex = gen("thin_apex.txt", "--seed 6 --n 9 --a 1 --p 0");
    for (const char* mode : {"planar", "one-apex", "a-apex", "vortex"}) {
        const std::string out = produce(std::string("thin_") + mode + ".txt",
                                        std::string("thin --mode ") + mode + " " + apex);
        Run v = run("verify " + apex + " " + out);
        INFO(mode << "\n" << v.out);
        CHECK(v.code == 0);
    }
    const std::string vortex = gen("thin_vortex.txt", "--seed 7 --n 9 --p 1");
    CHECK(run("verify " + vortex + " " + produce("thin_v.txt", "thin --mode vortex " + vortex)).code == 0);
    CHECK(run("thin --mode one-apex " + vortex).code == 2);
}

TEST_CASE("normalize and merge outputs parse as instances") {
    const std::string raw = gen("norm_inst.txt", "--seed 8 --n 9 --p 1 --unnormalized");
    CHECK(run("verify " + produce("facial.txt", "normalize " + raw)).code == 0);
    CHECK(run("verify " + produce("cross.txt", "normalize --cross " + raw)).code == 0);
    const std::string two = gen("merge_inst.txt", "--seed 9 --n 12 --k 2");
    CHECK(run("verify " + produce("merged.txt", "merge-vortices " + two)).code == 0);
}

TEST_CASE("harden: clique bundles replay") {
    const std::string tri = write_file("tri.txt", "graph 3\ne 0 1\ne 1 2\ne 0 2\n");
    for (const char* stage : {"biclique", "balancing"}) {
        const std::string b = produce(std::string("tri_") + stage + ".txt",
                                      std::string("harden clique ") + tri + " --k 2 --stage " + stage);
        Run v = run("harden verify " + b);
        INFO(stage << "\n" << v.out);
        CHECK(v.code == 0);
        CHECK(contains(v.out, "clique yes"));
    }
    const std::string empty = write_file("e3.txt", "graph 3\n");
    Run v = run("harden verify " + produce("e3_bal.txt", "harden clique " + empty + " --k 2 --stage balancing"));
    CHECK(v.code == 0);
    CHECK(contains(v.out, "clique no"));
    // The walk stage of a clique source is far beyond the vertex cap.
    CHECK(run("harden clique " + tri + " --k 2 --stage walk").code == 2);
}

TEST_CASE("harden: balancing bundles through ATSP") {
    const std::string yes = write_file("eb_yes.txt", "balancing 2\narc 0 1 : 1 2\narc 1 0 : 2\n");
    const std::string no = write_file("eb_no.txt", "balancing 2\narc 0 1 : 1\narc 1 0 : 2\n");
    Run vy = run("harden verify " + produce("eb_yes_b.txt", "harden balancing " + yes + " --stage atsp"));
    CHECK(vy.code == 0);
    CHECK(contains(vy.out, "balancing yes"));
    Run vn = run("harden verify " + produce("eb_no_b.txt", "harden balancing " + no + " --stage atsp"));
    CHECK(vn.code == 0);
    CHECK(contains(vn.out, "balancing no"));
}

TEST_CASE("harden: tampering is detected") {
    const std::string tri = write_file("tri2.txt", "graph 3\ne 0 1\ne 1 2\n");
    const std::string b = produce("tri2_b.txt", "harden clique " + tri + " --k 2 --stage biclique");
    std::ifstream in(b);
    std::stringstream text;
    text << in.rdbuf();
    std::string s = text.str();
    s.replace(s.find("be "), 3, "be 1");
    CHECK(run("harden verify " + write_file("tri2_bad.txt", s)).code == 1);
}

TEST_CASE("batch verify") {
    Run empty = run("batch-verify --suite vortex");
    CHECK(empty.code == 0);
    CHECK(contains(empty.out, "seeds=0 passed=0 failed=0"));
    Run h = run("batch-verify --suite harden --seeds 1-6,9");
    CHECK(h.code == 0);
    CHECK(contains(h.out, "seeds=7 passed=7"));
    Run l = run("batch-verify --suite lp --seeds 1,2");
    CHECK(l.code == 0);
    Run t = run("batch-verify --suite thin --seeds 1-2");
    CHECK(t.code == 0);
    CHECK(run("batch-verify --suite nope").code == 2);
}

TEST_CASE("exit codes for bad input") {
    CHECK(run("lp /nonexistent/file").code == 2);
    CHECK(run("lp " + write_file("junk.txt", "not an instance\n")).code == 2);
    CHECK(run("--guard-cuts 0 lp x").code == 2);
    CHECK(run("").code == 2);
    const std::string inst = gen("guard_inst.txt", "--seed 10 --n 9 --p 1");
    CHECK(run("--guard-oracle 3 oracle " + inst).code == 2);
}
