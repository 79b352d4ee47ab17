#include <doctest.h>
#include <json.hpp>

#include <atomic>
#include <sstream>
#include <stdexcept>

#include "msf/errors.hpp"
#include "msf/verify.hpp"

using namespace msf;

TEST_CASE("axis specs") {
    CHECK(parse_axis("0:4:0.5").size() == 9);
    CHECK(parse_axis("0:6:0.05").size() == 121);
    CHECK(parse_axis("0:6:0.05").back() == doctest::Approx(6.0));
    CHECK(parse_axis("1.25") == std::vector<double>{1.25});
    CHECK(parse_axis("-1:1:1") == std::vector<double>{-1.0, 0.0, 1.0});
    CHECK_THROWS_AS(parse_axis("0:4"), UsageError);
    CHECK_THROWS_AS(parse_axis("0:4:0"), UsageError);
    CHECK_THROWS_AS(parse_axis("4:0:1"), UsageError);
    CHECK_THROWS_AS(parse_axis("a:b:c"), UsageError);
    CHECK_THROWS_AS(parse_axis("0:4:1:2"), UsageError);
    CHECK_THROWS_AS(parse_axis(""), UsageError);
}

TEST_CASE("weight table") {
    RunConfig c;
    c.mu = 0.5;
    TabulateSpec s;
    s.target = "weight";
    s.axes = {{"u", "0:4:0.5"}, {"v", "0:4:0.5"}};
    const Table t = tabulate(c, s);
    CHECK(t.columns == std::vector<std::string>{"u", "v", "W0", "W1"});
    REQUIRE(t.rows.size() == 81);
    CHECK(t.rows[1][0] == 0.0);
    CHECK(t.rows[1][1] == 0.5);

    std::ostringstream a;
    std::ostringstream b;
    write_csv(a, t);
    write_csv(b, tabulate(c, s));
    CHECK(a.str() == b.str());
    CHECK(a.str().find('\r') == std::string::npos);
    CHECK(a.str().rfind("u,v,W0,W1\n", 0) == 0);

    std::ostringstream j;
    write_json(j, t, {{"target", "weight"}});
    const auto doc = nlohmann::json::parse(j.str());
    CHECK(doc["meta"]["target"] == "weight");
    REQUIRE(doc["records"].size() == 81);
    CHECK(doc["records"][80]["W1"].get<double>() == t.rows[80][3]);

    s.axes.pop_back();
    CHECK_THROWS_AS(tabulate(c, s), UsageError);
    s.target = "nonsense";
    CHECK_THROWS_AS(tabulate(c, s), UsageError);
}

TEST_CASE("spectrum shows the flux splitting") {
    RunConfig c;
    c.mu = 0.3;
    TabulateSpec s;
    s.target = "spectrum";
    s.lmax = 2;
    s.mmax = 1;
    const Table t = tabulate(c, s);
    REQUIRE(t.rows.size() == 10);
    for (const auto& row : t.rows) {
        const double shift = row[4] - row[5];
        CHECK(shift == doctest::Approx(row[0] >= 0 ? 0.3 : 0.0));
    }
}

TEST_CASE("kernel and state tables") {
    RunConfig c;
    c.mu = 0.3;
    TabulateSpec s;
    s.target = "kernel";
    s.l = -1;
    s.tau = 0.05;
    s.axes = {{"rho", "1.0"}, {"rhop", "0:6:0.05"}};
    const Table k = tabulate(c, s);
    CHECK(k.rows.size() == 121);
    CHECK(k.columns.back() == "im");

    s.target = "state";
    s.l = 2;
    s.m = 1;
    s.axes = {{"rho", "0:3:1"}};
    const Table st = tabulate(c, s);
    CHECK(st.rows.size() == 4);
    CHECK(st.rows[0][2] == 0.0);
}

TEST_CASE("verification reports") {
    RunConfig c;
    CHECK_THROWS_AS(verify_suite(c, "unknown"), UsageError);
    const VerificationReport w = verify_suite(c, "weights");
    CHECK(w.all_pass());
    REQUIRE(w.records.size() == 3);
    CHECK(w.records[0].achieved_error <= 1e-12);

    c.tol = 0.0;
    const VerificationReport strict = verify_suite(c, "weights");
    CHECK_FALSE(strict.all_pass());

    std::ostringstream a;
    std::ostringstream b;
    write_report_json(a, w, false);
    write_report_json(b, verify_suite(RunConfig{}, "weights"), false);
    CHECK(a.str() == b.str());
    const auto doc = nlohmann::json::parse(a.str());
    CHECK(doc["meta"]["suite"] == "weights");
    CHECK(doc["records"][0]["status"] == "pass");

    RunConfig bad;
    bad.vartheta = 0;
    CHECK_THROWS_AS(verify_suite(bad, "weights"), UsageError);
    bad = RunConfig{};
    bad.format = "xml";
    CHECK_THROWS_AS(bad.validate(), UsageError);
}

TEST_CASE("parallel_for is complete and rethrows by index") {
    std::vector<int> hits(1000, 0);
    parallel_for(hits.size(), [&](std::size_t i) { hits[i] += 1; });
    CHECK(std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; }));
    CHECK_THROWS_WITH(parallel_for(50,
                                   [](std::size_t i) {
                                       if (i == 7 || i == 30) {
                                           throw std::runtime_error(std::to_string(i));
                                       }
                                   }),
                      "7");
}
