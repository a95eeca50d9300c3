#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "gencdf/cli.hpp"

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run(std::vector<std::string> args) {
    args.insert(args.begin(), "gencdf");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = gencdf::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::string data(const std::string& name) { return std::string(GENCDF_TEST_DATA) + "/" + name; }

std::vector<std::string> lines(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string l; std::getline(in, l);) out.push_back(l);
    return out;
}

}  // namespace

TEST_CASE("validate") {
    const auto ok = run({"validate", data("beta1_g.json")});
    CHECK(ok.code == 0);
    const auto ls = lines(ok.out);
    REQUIRE(ls.size() == 11);
    CHECK(std::count_if(ls.begin(), ls.end(), [](const auto& l) { return l.find(": pass") != std::string::npos; }) ==
          10);
    CHECK(ls[8] == "d9: n/a");
    CHECK(ls.back() == "result: pass");

    const auto bad = run({"validate", data("fails_d7.json")});
    CHECK(bad.code == 2);
    CHECK(bad.out.find("d7: fail") != std::string::npos);
    CHECK(lines(bad.out).back() == "result: fail (d7)");

    CHECK(run({"validate", data("malformed.json")}).code == 1);
    CHECK(run({"validate", data("missing.json")}).code == 1);
}

TEST_CASE("curve") {
    const auto r = run({"curve", data("identity_uniform.json"), "--from", "0", "--to", "1", "--points", "3"});
    CHECK(r.code == 0);
    CHECK(r.out == "x,cdf\n0,0\n0.5,0.5\n1,1\n");

    const auto b = run({"curve", data("beta1_g.json"), "--from", "0", "--to", "1", "--points", "5", "--density"});
    CHECK(b.code == 0);
    const auto ls = lines(b.out);
    REQUIRE(ls.size() == 6);
    CHECK(ls[0] == "x,cdf,pdf");
    const auto row = ls[2];
    CHECK(row.substr(0, row.find(',')) == "0.25");
    const double cdf = std::stod(row.substr(row.find(',') + 1));
    CHECK(std::fabs(cdf - 0.15625) <= 1e-10);

    CHECK(run({"curve", data("identity_uniform.json"), "--from", "0", "--to", "1", "--points", "1"}).code == 1);
    CHECK(run({"curve", data("t7.json"), "--from", "0", "--to", "1", "--density"}).code == 1);
    CHECK(run({"curve", data("fails_d7.json"), "--from", "0", "--to", "1"}).code == 2);
}

TEST_CASE("sample") {
    const auto empty = run({"sample", data("identity_uniform.json"), "-n", "0"});
    CHECK(empty.code == 0);
    CHECK(empty.out.empty());

    const auto a = run({"sample", data("identity_uniform.json"), "-n", "10000", "--seed", "5"});
    const auto b = run({"sample", data("identity_uniform.json"), "-n", "10000", "--seed", "5"});
    CHECK(a.code == 0);
    CHECK(a.out == b.out);
    std::vector<double> xs;
    for (const auto& l : lines(a.out)) xs.push_back(std::stod(l));
    REQUIRE(xs.size() == 10000);
    std::sort(xs.begin(), xs.end());
    double d = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        d = std::max({d, (i + 1) / 1e4 - xs[i], xs[i] - i / 1e4});
    }
    CHECK(d < 1.628 / 100.0);
}

TEST_CASE("support and nature") {
    const auto s = run({"support", data("identity_uniform.json")});
    CHECK(s.code == 0);
    CHECK(lines(s.out).front() == "intervals: [0, 1]");
    CHECK(lines(run({"support", data("gap.json")}).out).front() == "intervals: [0, 1], [2, 3]");
    CHECK(run({"nature", data("discrete_g.json")}).out == "nature: discrete (C3.1)\n");
    CHECK(run({"nature", data("t7.json")}).out == "nature: discrete (T7)\n");
    CHECK(run({"nature", data("beta1_g.json")}).out == "nature: continuous_rv (T6)\n");
    CHECK(run({"nature", data("malformed.json")}).code == 1);
}

TEST_CASE("catalog") {
    const auto list = run({"catalog", "list"});
    CHECK(list.code == 0);
    CHECK(lines(list.out).size() >= 15);
    const auto check = run({"catalog", "check", "beta1_g", "--grid", "51"});
    CHECK(check.code == 0);
    CHECK(lines(check.out).back() == "result: pass");
    const auto unknown = run({"catalog", "check", "zeta_g"});
    CHECK(unknown.code == 1);
    CHECK(unknown.err.find("unknown entry") != std::string::npos);
}

TEST_CASE("usage errors") {
    CHECK(run({}).code == 1);
    CHECK(run({"frobnicate"}).code == 1);
    CHECK(run({"curve", data("beta1_g.json")}).code == 1);
    CHECK(run({"--help"}).code == 0);
}
