#include <doctest.h>

#include "hsa/builder.hpp"
#include "hsa/fixtures.hpp"
#include "hsa/serialize.hpp"

using namespace hsa;

namespace {

const char* kReferenceConfig = R"(# reference instance
q = 101
seed = 7
K = 6
s2 = 0 1
T = 1 1
user 1 1 = 1 3 4 6
user 1 2 = 1 2 6
user 2 1 = 2 3 5
user 2 2 = 2 3 4 5
user 2 3 = 2 3 4
user 2 4 = 3 4 5
drop 2 = 1
)";

} // namespace

TEST_CASE("config parsing matches the embedded assignment") {
    ScenarioConfig cfg = parse_config(kReferenceConfig);
    CHECK(cfg.q == 101);
    CHECK(cfg.seed == 7);
    CHECK(cfg.assignment.holds == fixture_assignment().holds);
    CHECK(cfg.s2 == std::vector<int>{0, 1});
    CHECK(cfg.T == std::vector<int>{1, 1});
    REQUIRE(cfg.dropouts.size() == 2);
    CHECK(cfg.dropouts[0].empty());
    CHECK(cfg.dropouts[1] == std::vector<int>{0});
}

TEST_CASE("config defaults and overrides") {
    ScenarioConfig cfg = parse_config("K = 1\nuser 1 1 = 1\n");
    CHECK(cfg.q == 101);
    CHECK(cfg.seed == 1);
    CHECK(cfg.lprime == 1);
    CHECK(cfg.s2 == std::vector<int>{0});
    CHECK(cfg.T == std::vector<int>{0});
    CHECK(cfg.dropouts.empty());
    CHECK(cfg.sweep_cap == 10000);
    CHECK(cfg.sweep_samples == 1000);
}

TEST_CASE("config rejections name the offense") {
    auto reject = [](const std::string& text) {
        try {
            parse_config(text);
            return false;
        } catch (const Error& e) {
            return e.code() == Errc::ParseError;
        }
    };
    CHECK(reject("user 1 1 = 1\n"));                        // missing K
    CHECK(reject("K = 2\nuser 1 1 = 1\nuser 1 1 = 2\n"));   // duplicate user
    CHECK(reject("K = 2\nuser 1 1 = 3\n"));                 // dataset out of range
    CHECK(reject("K = 2\nuser 1 2 = 1\n"));                 // user (1,1) missing
    CHECK(reject("K = 1\nuser 1 1 = 1\nwhat = 3\n"));       // unknown key
    CHECK(reject("K = 2\nK = 2\nuser 1 1 = 1\n"));          // duplicate key
    CHECK(reject("K = 1\nuser 1 1 = 1\ns2 = 0 0\n"));       // s2 length != U
    CHECK(reject("K = 1\nuser 1 1 = 1\ndrop 2 = 1\n"));     // unknown cluster
    CHECK(reject("K = 1\nuser 1 1 = 1\nq = seven\n"));      // not an integer
    CHECK(reject("bare line\n"));                           // no equals sign
}

TEST_CASE("scheme dumps round-trip exactly") {
    Scheme s = build_scheme(101, fixture_assignment(), {0, 1}, {1, 1}, 7);
    std::string dump = scheme_text(s);
    Scheme r = parse_scheme(dump);
    CHECK(r.field.q() == s.field.q());
    CHECK(r.seed == s.seed);
    CHECK(r.assignment.holds == s.assignment.holds);
    CHECK(r.relay.S1 == s.relay.S1);
    CHECK(r.relay.F == s.relay.F);
    CHECK(r.relay.F1 == s.relay.F1);
    CHECK(r.relay.B1 == s.relay.B1);
    CHECK(r.relay.sinv_top == s.relay.sinv_top);
    for (int u = 0; u < s.params.U; ++u) {
        CHECK(r.clusters[u].S2 == s.clusters[u].S2);
        CHECK(r.clusters[u].F2 == s.clusters[u].F2);
        CHECK(r.clusters[u].B2 == s.clusters[u].B2);
        CHECK(r.clusters[u].block_rows == s.clusters[u].block_rows);
    }
    CHECK(r.rate.key_count == s.rate.key_count);
    CHECK(scheme_text(r) == dump); // emission is canonical
}

TEST_CASE("scheme parser rejects malformed dumps") {
    Scheme s = build_scheme(101, fixture_assignment(), {0, 1}, {1, 1}, 8);
    std::string dump = scheme_text(s);
    auto reject = [](std::string text) {
        try {
            parse_scheme(text);
            return false;
        } catch (const Error& e) {
            return e.code() == Errc::ParseError || e.code() == Errc::NonPrimeModulus;
        }
    };
    CHECK(reject(dump.substr(0, dump.size() / 2))); // truncated
    CHECK(reject("not-a-scheme 1\n"));
    std::string wrong_magic = dump;
    wrong_magic.replace(wrong_magic.find("hsa-scheme 1"), 12, "hsa-scheme 9");
    CHECK(reject(wrong_magic));
    std::string bad_q = dump;
    bad_q.replace(bad_q.find("q 101"), 5, "q 100");
    CHECK(reject(bad_q));
}

TEST_CASE("transcript text lists every party") {
    Scheme s = fixture_scheme(101);
    Rng rng(71);
    auto [w, n] = sample_inputs(s, 1, rng);
    Transcript t = simulate(s, w, n, {{}, {0}});
    std::string text = transcript_text(s, t);
    CHECK(text.find("survivors 2 : 2 3 4") != std::string::npos);
    CHECK(text.find("X 2 1 : -") != std::string::npos); // the dropped user
    CHECK(text.find("Y 1 :") != std::string::npos);
    CHECK(text.find("decoded 2 1") != std::string::npos);
}

TEST_CASE("report text marks failures greppably") {
    AuditReport rep;
    rep.lines.push_back({"constraint1", "-", 2, 2, true});
    rep.lines.push_back({"server_mi", "T={1:[1]}", 1, 0, false});
    std::string text = report_text(rep);
    CHECK(text.find("[PASS] constraint1") != std::string::npos);
    CHECK(text.find("[FAIL] server_mi T={1:[1]} measured=1 expected=0") != std::string::npos);
    CHECK(text.find("FAILURES present") != std::string::npos);
    std::string json = report_json(rep);
    CHECK(json.find("\"ok\": false") != std::string::npos);
    CHECK(json.find("\"measured\": 1") != std::string::npos);
}

TEST_CASE("rates text prints exact fractions") {
    DerivedParams p = derive_params(fixture_assignment(), {0, 1}, {1, 1});
    RateReport r = rates(p);
    std::string text = rates_text(p, r);
    CHECK(text.rfind("R1=1 R2=[1, 1/2] RZ=5/2 keys=5\n", 0) == 0);
    CHECK(text.find("feasible yes") != std::string::npos);
    CHECK(text.find("boundary tight") != std::string::npos);
    std::string json = rates_json(p, r);
    CHECK(json.find("\"RZ\": \"5/2\"") != std::string::npos);
}

TEST_CASE("missing files raise IoError") {
    try {
        read_text_file("/nonexistent/path/xyz.cfg");
        FAIL("expected a throw");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::IoError);
    }
}
