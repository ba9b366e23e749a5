#include "hsa/topology.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <string>

namespace hsa {

bool Assignment::user_holds(int u, int v, int k) const {
    const auto& h = holds.at(u).at(v);
    return std::binary_search(h.begin(), h.end(), k);
}

bool Assignment::cluster_holds(int u, int k) const {
    for (int v = 0; v < V(u); ++v)
        if (user_holds(u, v, k)) return true;
    return false;
}

std::vector<int> Assignment::cluster_datasets(int u) const {
    std::set<int> s;
    for (const auto& h : holds.at(u)) s.insert(h.begin(), h.end());
    return {s.begin(), s.end()};
}

void Assignment::validate() const {
    if (K < 1) raise(Errc::OrphanDataset, "dataset count must be positive");
    if (holds.empty()) raise(Errc::EmptyUserAssignment, "no clusters");
    for (int u = 0; u < U(); ++u) {
        if (holds[u].empty())
            raise(Errc::EmptyUserAssignment, "cluster " + std::to_string(u + 1) + " has no users");
        for (int v = 0; v < V(u); ++v) {
            const auto& h = holds[u][v];
            if (h.empty())
                raise(Errc::EmptyUserAssignment, "user (" + std::to_string(u + 1) + "," +
                                                     std::to_string(v + 1) + ") holds nothing");
            for (std::size_t i = 0; i < h.size(); ++i) {
                if (h[i] < 0 || h[i] >= K)
                    raise(Errc::IndexOutOfRange,
                          "dataset id " + std::to_string(h[i] + 1) + " outside 1.." + std::to_string(K));
                if (i > 0 && h[i] <= h[i - 1])
                    raise(Errc::ParseError, "dataset list not sorted/unique for user (" +
                                                std::to_string(u + 1) + "," + std::to_string(v + 1) + ")");
            }
        }
    }
    for (int k = 0; k < K; ++k) {
        bool held = false;
        for (int u = 0; u < U() && !held; ++u) held = cluster_holds(u, k);
        if (!held)
            raise(Errc::OrphanDataset, "dataset " + std::to_string(k + 1) + " assigned to no user");
    }
}

DerivedParams derive_params(const Assignment& a, const std::vector<int>& s2,
                            const std::vector<int>& T) {
    a.validate();
    const int U = a.U();
    if (static_cast<int>(s2.size()) != U)
        raise(Errc::DimensionMismatch, "s2 must list one straggler budget per cluster");
    if (static_cast<int>(T.size()) != U)
        raise(Errc::DimensionMismatch, "T must list one collusion budget per cluster");
    for (int u = 0; u < U; ++u) {
        if (s2[u] < 0) raise(Errc::IndexOutOfRange, "negative straggler budget");
        if (T[u] < 0) raise(Errc::IndexOutOfRange, "negative collusion budget");
    }

    DerivedParams p;
    p.K = a.K;
    p.U = U;
    p.s2 = s2;
    p.T = T;
    for (int u = 0; u < U; ++u) p.V.push_back(a.V(u));

    p.r1k.assign(a.K, 0);
    p.r2k.assign(U, std::vector<int>(a.K, 0));
    for (int u = 0; u < U; ++u)
        for (int k = 0; k < a.K; ++k) {
            for (int v = 0; v < a.V(u); ++v)
                if (a.user_holds(u, v, k)) ++p.r2k[u][k];
            if (p.r2k[u][k] > 0) ++p.r1k[k];
        }
    p.r1 = *std::min_element(p.r1k.begin(), p.r1k.end());

    p.r2.assign(U, 0);
    for (int u = 0; u < U; ++u) {
        int best = 0;
        for (int k = 0; k < a.K; ++k)
            if (p.r2k[u][k] > 0 && (best == 0 || p.r2k[u][k] < best)) best = p.r2k[u][k];
        p.r2[u] = best; // >= 1: every cluster has a non-empty user
    }

    p.m1 = p.r1;
    p.m2.assign(U, 0);
    for (int u = 0; u < U; ++u) p.m2[u] = p.r2[u] - p.s2[u];

    // Smallest piece count making every relay task and user block integral:
    // lcm over clusters of m1 * m2[u]. Whenever gcd(m1, lcm(m2)) = 1 this
    // equals lcm(m1, m2[1..U]).
    long long m = 1;
    for (int u = 0; u < U; ++u) {
        long long unit = static_cast<long long>(p.m1) * std::max(p.m2[u], 1);
        m = std::lcm(m, unit);
    }
    p.m = static_cast<int>(m);
    return p;
}

void check_feasibility(const DerivedParams& p) {
    for (int u = 0; u < p.U; ++u) {
        if (p.s2[u] >= p.r2[u])
            raise(Errc::TooManyStragglers, "cluster " + std::to_string(u + 1) + ": s2=" +
                                               std::to_string(p.s2[u]) + " but in-cluster replication is " +
                                               std::to_string(p.r2[u]));
        if (p.T[u] > p.V[u] - p.r2[u])
            raise(Errc::TooManyColluders, "cluster " + std::to_string(u + 1) + ": T=" +
                                              std::to_string(p.T[u]) + " exceeds V-r2=" +
                                              std::to_string(p.V[u] - p.r2[u]));
    }
    if (p.r1 > p.U - 1)
        raise(Errc::ReplicationTooHigh, "some dataset is replicated in every cluster (r1=" +
                                            std::to_string(p.r1) + ", U=" + std::to_string(p.U) + ")");
}

RateReport rates(const DerivedParams& p) {
    RateReport rep;
    rep.R1 = Rational(1, p.m1);
    for (int u = 0; u < p.U; ++u)
        rep.R2.push_back(Rational(1, static_cast<long long>(p.m1) * p.m2[u]));

    // Largest per-cluster demand: survivors of one cluster plus colluders
    // everywhere else.
    Rational relay_term(0);
    for (int i = 0; i < p.U; ++i) {
        Rational t = Rational(p.V[i] - p.s2[i]) * rep.R2[i];
        for (int j = 0; j < p.U; ++j)
            if (j != i) t += Rational(p.T[j]) * rep.R2[j];
        relay_term = max(relay_term, t);
    }
    Rational server_a = Rational(p.U) * rep.R1 - Rational(1);
    Rational server_b = Rational(-1);
    for (int i = 0; i < p.U; ++i) {
        server_a += Rational(p.T[i]) * rep.R2[i];
        server_b += Rational(p.V[i] - p.s2[i]) * rep.R2[i];
    }
    rep.RZ = max(relay_term, min(server_a, server_b));

    Rational keys = Rational(p.m) * rep.RZ;
    if (!keys.is_integer())
        raise(Errc::NonIntegralKeyCount, "m*RZ = " + keys.str() + " is not an integer");
    rep.key_count = keys.num;
    return rep;
}

} // namespace hsa
