#pragma once

#include <cstddef>
#include <vector>

#include "hsa/rational.hpp"

namespace hsa {

/// Which datasets each user stores. Clusters and users are 0-indexed
/// internally; dataset ids are 0-indexed too. Config files and reports
/// use 1-based ids at the boundary.
struct Assignment {
    int K = 0;
    /// holds[u][v] = sorted, deduplicated dataset ids of user v in cluster u.
    std::vector<std::vector<std::vector<int>>> holds;

    int U() const noexcept { return static_cast<int>(holds.size()); }
    int V(int u) const { return static_cast<int>(holds.at(u).size()); }

    bool user_holds(int u, int v, int k) const;
    bool cluster_holds(int u, int k) const;
    std::vector<int> cluster_datasets(int u) const;

    /// Enforces K >= 1, U >= 1, V_u >= 1, valid ids, sorted unique lists,
    /// no empty user, no dataset missing from every cluster.
    void validate() const;
};

/// Replication structure and block sizes induced by an assignment plus the
/// per-cluster straggler budgets s2 and collusion budgets T.
struct DerivedParams {
    int K = 0;
    int U = 0;
    std::vector<int> V;
    std::vector<int> s2;
    std::vector<int> T;

    std::vector<int> r1k;              ///< clusters replicating each dataset
    std::vector<std::vector<int>> r2k; ///< r2k[u][k]: users in cluster u holding k (0 if unheld)
    int r1 = 0;
    std::vector<int> r2; ///< min in-cluster replication over held datasets

    int m1 = 0;
    std::vector<int> m2;
    /// Piece count per gradient; smallest value divisible by every
    /// m1 * m2[u], so all block sizes below are integral.
    int m = 0;

    /// Flat coordinate of piece j of dataset k inside the stacked gradient
    /// vector (both 0-based).
    std::size_t col(int k, int j) const { return static_cast<std::size_t>(j) * K + k; }

    std::size_t gradient_dim() const { return static_cast<std::size_t>(K) * m; }
    std::size_t relay_rows() const { return static_cast<std::size_t>(U) * m / m1; } ///< rows of S1
    std::size_t relay_task_rows() const { return static_cast<std::size_t>(m) / m1; } ///< per relay
    std::size_t user_rows(int u) const { return static_cast<std::size_t>(m) / (m1 * m2.at(u)); }
    std::size_t cluster_code_rows(int u) const { return (V.at(u) - s2.at(u)) * user_rows(u); }
};

/// Computes replication counts and block sizes. Throws EmptyUserAssignment /
/// OrphanDataset on malformed assignments and IndexOutOfRange on s2/T of the
/// wrong length, but does not judge feasibility.
DerivedParams derive_params(const Assignment& a, const std::vector<int>& s2,
                            const std::vector<int>& T);

/// Throws TooManyStragglers, TooManyColluders or ReplicationTooHigh when the
/// parameters sit outside the achievable region.
void check_feasibility(const DerivedParams& p);

struct RateReport {
    Rational R1;              ///< per-relay upload per gradient symbol
    std::vector<Rational> R2; ///< per-user upload per gradient symbol
    Rational RZ;              ///< source-key rate
    long long key_count = 0;  ///< m * RZ, in units of gradient pieces
};

/// Exact rate point; key_count = m * RZ must be integral
/// (NonIntegralKeyCount otherwise).
RateReport rates(const DerivedParams& p);

} // namespace hsa
