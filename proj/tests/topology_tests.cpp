#include <doctest.h>

#include <numeric>

#include "hsa/fixtures.hpp"
#include "hsa/topology.hpp"

using namespace hsa;

namespace {

Assignment two_cluster_toy() {
    // Each dataset lives in exactly one cluster.
    Assignment a;
    a.K = 2;
    a.holds = {{{0}}, {{1}}};
    return a;
}

} // namespace

TEST_CASE("assignment validation") {
    Assignment a = fixture_assignment();
    CHECK_NOTHROW(a.validate());
    CHECK(a.U() == 2);
    CHECK(a.V(0) == 2);
    CHECK(a.V(1) == 4);
    CHECK(a.user_holds(0, 0, 0));
    CHECK(!a.user_holds(0, 0, 1));
    CHECK(a.cluster_holds(1, 4));
    CHECK(!a.cluster_holds(1, 0));
    CHECK(a.cluster_datasets(0) == std::vector<int>{0, 1, 2, 3, 5});

    Assignment empty_user = a;
    empty_user.holds[0][1].clear();
    CHECK_THROWS_AS(empty_user.validate(), Error);

    Assignment orphan = a;
    orphan.K = 7; // dataset 7 held by nobody
    try {
        orphan.validate();
        FAIL("expected a throw");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::OrphanDataset);
    }

    Assignment unsorted = a;
    unsorted.holds[0][0] = {2, 0, 3, 5};
    CHECK_THROWS_AS(unsorted.validate(), Error);

    Assignment out_of_range = a;
    out_of_range.holds[0][0] = {0, 6};
    CHECK_THROWS_AS(out_of_range.validate(), Error);
}

TEST_CASE("derived parameters of the reference instance") {
    DerivedParams p = derive_params(fixture_assignment(), {0, 1}, {1, 1});
    CHECK(p.r1k == std::vector<int>{1, 2, 2, 2, 1, 1});
    CHECK(p.r1 == 1);
    CHECK(p.r2 == std::vector<int>{1, 3});
    CHECK(p.m1 == 1);
    CHECK(p.m2 == std::vector<int>{1, 2});
    CHECK(p.m == 2);
    CHECK(p.gradient_dim() == 12);
    CHECK(p.relay_rows() == 4);
    CHECK(p.relay_task_rows() == 2);
    CHECK(p.user_rows(0) == 2);
    CHECK(p.user_rows(1) == 1);
    CHECK(p.cluster_code_rows(0) == 4);
    CHECK(p.cluster_code_rows(1) == 3);
    CHECK(p.col(0, 0) == 0);
    CHECK(p.col(5, 1) == 11);
    CHECK_NOTHROW(check_feasibility(p));
}

TEST_CASE("rates of the reference instance") {
    DerivedParams p = derive_params(fixture_assignment(), {0, 1}, {1, 1});
    RateReport r = rates(p);
    CHECK(r.R1 == Rational(1));
    CHECK(r.R2 == std::vector<Rational>{Rational(1), Rational(1, 2)});
    CHECK(r.RZ == Rational(5, 2));
    CHECK(r.key_count == 5);
}

TEST_CASE("symmetric toy rate point") {
    DerivedParams p = derive_params(two_cluster_toy(), {0, 0}, {0, 0});
    RateReport r = rates(p);
    CHECK(r.R1 == Rational(1));
    CHECK(r.R2 == std::vector<Rational>{Rational(1), Rational(1)});
    CHECK(r.RZ == Rational(1));
    CHECK(r.key_count == 1);
}

TEST_CASE("feasibility rejections are named") {
    Assignment a = fixture_assignment();

    try {
        check_feasibility(derive_params(a, {0, 3}, {1, 1})); // s2 >= r2 in cluster 2
        FAIL("expected a throw");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::TooManyStragglers);
    }

    try {
        check_feasibility(derive_params(a, {0, 1}, {2, 1})); // T > V - r2 in cluster 1
        FAIL("expected a throw");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::TooManyColluders);
    }

    Assignment full = a;
    for (auto& users : full.holds)
        for (auto& ids : users) ids = {0, 1, 2, 3, 4, 5}; // r1 = U
    try {
        check_feasibility(derive_params(full, {0, 1}, {0, 0}));
        FAIL("expected a throw");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::ReplicationTooHigh);
    }
}

TEST_CASE("single-dataset instances are never feasible") {
    // With one dataset every cluster must hold it, so r1 = U.
    Assignment a;
    a.K = 1;
    a.holds = {{{0}}, {{0}, {0}}};
    CHECK_THROWS_AS(check_feasibility(derive_params(a, {0, 0}, {0, 0})), Error);
}

TEST_CASE("piece count divides every block structure") {
    DerivedParams p = derive_params(fixture_assignment(), {0, 1}, {1, 1});
    for (int u = 0; u < p.U; ++u) CHECK(p.m % (p.m1 * p.m2[u]) == 0);
    // and it is the least such value
    for (int cand = 1; cand < p.m; ++cand) {
        bool all = true;
        for (int u = 0; u < p.U; ++u) all = all && cand % (p.m1 * p.m2[u]) == 0;
        CHECK(!all);
    }
}

TEST_CASE("key count bounds hold on the reference instance") {
    DerivedParams p = derive_params(fixture_assignment(), {0, 1}, {1, 1});
    RateReport r = rates(p);
    CHECK(r.key_count >= static_cast<long long>(p.relay_rows()) - p.m);
    CHECK(Rational(r.key_count) == r.RZ * Rational(p.m));
}

TEST_CASE("mismatched budget vectors are rejected") {
    Assignment a = two_cluster_toy();
    CHECK_THROWS_AS(derive_params(a, {0}, {0, 0}), Error);
    CHECK_THROWS_AS(derive_params(a, {0, 0}, {0}), Error);
    CHECK_THROWS_AS(derive_params(a, {0, -1}, {0, 0}), Error);
}
