#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include <catch2/catch_amalgamated.hpp>

using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::StartsWith;

namespace {

struct RunResult {
    int code = -1;
    std::string out;
};

// spawn the tool named by QF_CLI with stderr folded into stdout
RunResult run(const std::string& args) {
    const char* cli = std::getenv("QF_CLI");
    if (!cli) throw std::runtime_error("QF_CLI is not set; run through ctest");
    const std::string cmd = std::string(cli) + " " + args + " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) throw std::runtime_error("popen failed");
    RunResult r;
    char buf[4096];
    std::size_t got;
    while ((got = std::fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, got);
    const int status = pclose(pipe);
    r.code = (status >= 0 && WIFEXITED(status)) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string scratch_path(const std::string& leaf) {
    static const std::string dir = [] {
        char tmpl[] = "/tmp/qf_cli_test_XXXXXX";
        const char* d = mkdtemp(tmpl);
        if (!d) throw std::runtime_error("mkdtemp failed");
        return std::string(d);
    }();
    return dir + "/" + leaf;
}

void write_file(const std::string& path, const std::string& body) {
    std::ofstream f(path);
    f << body;
}

std::string read_file(const std::string& path) {
    std::ifstream f(path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

// drop the volatile timing line so repeated runs compare byte-for-byte
std::string strip_timing(const std::string& s) {
    std::string out;
    std::istringstream in(s);
    std::string line;
    while (std::getline(in, line))
        if (line.find("\"timing_ms\"") == std::string::npos) out += line + "\n";
    return out;
}

}  // namespace

TEST_CASE("derive prints bare mixed partials") {
    const RunResult r = run("derive --f \"x^2*y\" --point 2,3 --axes 1,2");
    CHECK(r.code == 0);
    CHECK(r.out == "4\n");

    const RunResult s = run("derive --f \"sin(x)\" --point 0 --axes 1");
    CHECK(s.code == 0);
    CHECK(s.out == "1\n");

    const RunResult t = run("derive --f \"x^2*y\" --point 1.5 --axes 1,2");
    CHECK(t.code == 2);  // axis 2 points past the end of a one-component point
}

TEST_CASE("classify names the matched characters") {
    const RunResult r = run("classify --form delta2 --F \"x*y\"");
    CHECK(r.code == 0);
    CHECK_THAT(r.out, StartsWith("matched: LeibnizFubini\n"));
    CHECK_THAT(r.out, ContainsSubstring("residual[Cartan] = "));
    CHECK_THAT(r.out, ContainsSubstring("tol = "));

    const RunResult s = run("classify --form d --X \"0, x\"");
    CHECK(s.code == 0);
    CHECK_THAT(s.out, StartsWith("matched: Cartan\n"));
    CHECK_THAT(s.out, ContainsSubstring("residual[Cartan] = 0\n"));

    const RunResult z = run("classify --form blackbox-zero");
    CHECK(z.code == 0);
    CHECK_THAT(z.out, StartsWith("matched: Cartan, LeibnizFubini, Nieuwentijdt\n"));
}

TEST_CASE("classify honors --expect") {
    CHECK(run("classify --form delta2 --F \"x*y\" --expect LeibnizFubini").code == 0);
    CHECK(run("classify --form delta2 --F \"x*y\" --expect lf").code == 0);
    CHECK(run("classify --form delta2 --F \"x*y\" --expect Cartan").code == 1);
    CHECK(run("classify --form delta2 --F \"x*y\" --expect Wrongname").code == 2);
}

TEST_CASE("classify reads orbit tables from disk") {
    // sigma_C rows: +1 on rotations, -1 on reflections, element order r^a s^b
    const std::string table = scratch_path("table.json");
    write_file(table,
               "[[2.5,2.5,2.5,2.5,-2.5,-2.5,-2.5,-2.5],"
               " [1.0,1.0,1.0,1.0,-1.0,-1.0,-1.0,-1.0]]");
    const RunResult r = run("classify --form blackbox-table --table " + table);
    CHECK(r.code == 0);
    CHECK_THAT(r.out, StartsWith("matched: Cartan\n"));

    const std::string bad = scratch_path("bad_table.json");
    write_file(bad, "[[1,2,3]]");
    CHECK(run("classify --form blackbox-table --table " + bad).code == 2);
    CHECK(run("classify --form blackbox-table").code == 2);
}

TEST_CASE("verify stokes and ftc2d report PASS with zero residual") {
    const RunResult r = run("verify stokes --X \"0, x\" --domain 0,1,0,1 --grid 8x8");
    CHECK(r.code == 0);
    CHECK_THAT(r.out, ContainsSubstring("check: stokes\n"));
    CHECK_THAT(r.out, ContainsSubstring("integral of d(alpha) = 1\n"));
    CHECK_THAT(r.out, ContainsSubstring("boundary sum = 1\n"));
    CHECK_THAT(r.out, ContainsSubstring("residual = 0 "));
    CHECK_THAT(r.out, ContainsSubstring("result: PASS\n"));

    const RunResult f = run("verify ftc2d --F \"x^2*y^2\" --domain 0,1,0,2 --grid 16x16");
    CHECK(f.code == 0);
    CHECK_THAT(f.out, ContainsSubstring("integral of delta2(F) = 4\n"));
    CHECK_THAT(f.out, ContainsSubstring("corner sum = 4\n"));
    CHECK_THAT(f.out, ContainsSubstring("result: PASS\n"));
}

TEST_CASE("verify relative-ftc prints the directed side sums") {
    const RunResult r = run("verify relative-ftc --X \"0, x\" --domain 0,1,0,1 --grid 4x4");
    CHECK(r.code == 0);
    CHECK_THAT(r.out, ContainsSubstring("side B->A = "));
    CHECK_THAT(r.out, ContainsSubstring("result: PASS\n"));
}

TEST_CASE("verify kock-lawvere samples the affine expansion") {
    const RunResult r = run("verify kock-lawvere --cases 50");
    CHECK(r.code == 0);
    CHECK_THAT(r.out, ContainsSubstring("check: kock-lawvere\n"));
    CHECK_THAT(r.out, ContainsSubstring("cases = 50\n"));
    CHECK_THAT(r.out, ContainsSubstring("result: PASS\n"));
}

TEST_CASE("verify convergence passes at the default threshold and fails at 5") {
    const RunResult r = run("verify convergence --F \"x^2*y^2/4\" --domain 0,1,0,1 --grids 4,8,16,32");
    CHECK(r.code == 0);
    CHECK_THAT(r.out, ContainsSubstring("corner = 0.25\n"));
    CHECK_THAT(r.out, ContainsSubstring("result: PASS\n"));

    const RunResult f = run(
        "verify convergence --F \"x^2*y^2/4\" --domain 0,1,0,1 --grids 4,8,16,32 --threshold 5");
    CHECK(f.code == 1);
    CHECK_THAT(f.out, ContainsSubstring("result: FAIL\n"));
}

TEST_CASE("verify pullback-type tracks the declared character") {
    const RunResult r = run(
        "verify pullback-type --form d --X \"0, z, 0\" --phi \"x, y, x^2 + y^2\"");
    CHECK(r.code == 0);
    CHECK_THAT(r.out, ContainsSubstring("declared = Cartan\n"));
    CHECK_THAT(r.out, ContainsSubstring("result: PASS\n"));

    const RunResult s = run(
        "verify pullback-type --form delta2 --F \"x*y + z^2\" --phi \"x, y, x^2 + y^2\"");
    CHECK(s.code == 0);
    CHECK_THAT(s.out, ContainsSubstring("declared = LeibnizFubini\n"));

    CHECK(run("verify pullback-type --form blackbox-zero --phi \"x, y\"").code == 2);
}

TEST_CASE("integrate only accepts the directly integrable type") {
    const RunResult ok = run("integrate --form delta2 --F \"x*y\" --domain 0,1,0,1 --grid 8x8");
    CHECK(ok.code == 0);
    CHECK(ok.out == "integral = 1\n");

    const RunResult no = run("integrate --form d --X \"0, x\" --domain 0,1,0,1 --grid 8x8");
    CHECK(no.code == 1);
    CHECK_THAT(no.out, ContainsSubstring("only Leibniz-Fubini 2-forms"));
    CHECK_THAT(no.out, ContainsSubstring("this form is Cartan"));

    const RunResult un = run("integrate --form blackbox-zero --domain 0,1,0,1 --grid 4x4");
    CHECK(un.code == 1);
    CHECK_THAT(un.out, ContainsSubstring("this form is undeclared"));
}

TEST_CASE("json reports are byte-identical apart from timing") {
    const std::string cmd = "classify --form delta2 --F \"x*y\" --format json";
    const RunResult a = run(cmd);
    const RunResult b = run(cmd);
    CHECK(a.code == 0);
    CHECK_THAT(a.out, ContainsSubstring("\"command\": \"classify\""));
    CHECK_THAT(a.out, ContainsSubstring("\"timing_ms\""));
    CHECK(strip_timing(a.out) == strip_timing(b.out));

    const std::string vcmd = "verify stokes --X \"0, x\" --domain 0,1,0,1 --grid 4x4 --format json";
    CHECK(strip_timing(run(vcmd).out) == strip_timing(run(vcmd).out));
}

TEST_CASE("convergence tables export as csv") {
    const RunResult r = run(
        "verify convergence --F \"x^2*y^2/4\" --domain 0,1,0,1 --grids 4,8 --format csv");
    CHECK(r.code == 0);
    CHECK(r.out ==
          "m,n,riemann,corner,abs_error,order\n"
          "4,4,0.140625,0.25,0.109375,\n"
          "8,8,0.19140625,0.25,0.05859375,0.9004643264490856\n");

    // csv is meaningless elsewhere
    CHECK(run("classify --form delta2 --F \"x*y\" --format csv").code == 2);
}

TEST_CASE("reports can be written to a file") {
    const std::string out = scratch_path("stokes.txt");
    const RunResult r = run("verify stokes --X \"0, x\" --domain 0,1,0,1 --grid 4x4 --out " + out);
    CHECK(r.code == 0);
    CHECK(r.out.empty());
    CHECK_THAT(read_file(out), ContainsSubstring("result: PASS\n"));
}

TEST_CASE("config files fill flags the command line left unset") {
    const std::string cfg = scratch_path("stokes_cfg.json");
    write_file(cfg, "{\"X\": \"0, x\", \"domain\": [0, 1, 0, 1], \"grid\": [8, 8]}");
    const RunResult r = run("verify stokes --config " + cfg);
    CHECK(r.code == 0);
    CHECK_THAT(r.out, ContainsSubstring("result: PASS\n"));

    // explicit flags win over the file
    const RunResult s = run("verify stokes --config " + cfg + " --grid 2x2");
    CHECK(s.code == 0);

    const std::string bad = scratch_path("bad_cfg.json");
    write_file(bad, "{\"X\": \"0, x\", \"bogus\": 1}");
    const RunResult t = run("verify stokes --config " + bad + " --domain 0,1,0,1 --grid 2x2");
    CHECK(t.code == 2);
    CHECK_THAT(t.out, ContainsSubstring("bogus"));

    const std::string broken = scratch_path("broken_cfg.json");
    write_file(broken, "{\"X\": ");
    CHECK(run("verify stokes --config " + broken).code == 2);
}

TEST_CASE("malformed input exits with the usage code") {
    const RunResult r = run("derive --f \"x +\" --point 1 --axes 1");
    CHECK(r.code == 2);
    CHECK_THAT(r.out, StartsWith("error: "));
    CHECK_THAT(r.out, ContainsSubstring("(at offset 3)"));

    CHECK(run("fromage --form delta2").code == 2);
    CHECK(run("derive --point 1 --axes 1").code == 2);
    CHECK(run("verify stokes --X \"0, x\" --domain 1,0,0,1 --grid 4x4").code == 2);
    CHECK(run("verify stokes --X \"0, x\" --domain 0,1,0,1 --grid 0x4").code == 2);
    CHECK(run("verify nonsense --X \"0, x\"").code == 2);
    CHECK(run("integrate --form lf-parallelogram --b \"1, 0; 0, 1\" --domain 0,1,0,1 "
              "--grid 4x4 --expect-nothing").code == 2);
    CHECK(run("--help").code == 0);
    CHECK(run("verify --help").code == 0);
}

TEST_CASE("seeded sampling is reproducible across runs") {
    const std::string cmd = "classify --form lf --A \"y, x\" --a \"x, 0; 0, y\" --seed 42";
    const RunResult a = run(cmd);
    const RunResult b = run(cmd);
    CHECK(a.code == 0);
    CHECK(a.out == b.out);
    CHECK_THAT(a.out, StartsWith("matched: LeibnizFubini\n"));
}
