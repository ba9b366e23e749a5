#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hsa/builder.hpp"

namespace hsa {

/// How a colluding user's stored data enters the adversary's side
/// information: as the full tuple of held pieces (conservative default) or
/// only as the per-piece partial sums over its held datasets.
enum class ColluderInputMode { HeldPieces, PartialSums };

/// One colluding-user set per cluster, sorted 0-based user ids.
using ColluderSets = std::vector<std::vector<int>>;

std::string scenario_string(const ColluderSets& colluders);

struct CheckResult {
    std::string check;
    std::string scenario;
    long long measured = 0;
    long long expected = 0;
    bool pass = false;
};

struct AuditReport {
    std::vector<CheckResult> lines;
    bool ok() const;
    const CheckResult* first_failure() const;
};

/// Keys must fill the whole null space of the decoder rows and die under them.
CheckResult check_constraint1(const Scheme& s);

/// Relay u's key block stacked over out-of-cluster colluders' key shares must
/// have full row rank. Entries for cluster u itself are ignored: its users'
/// shares already lie in the row space of B2.
CheckResult check_constraint2(const Scheme& s, int u, const ColluderSets& colluders);

/// B1 stacked over every colluder's key share must reach rank
/// (null-space dimension) + (total colluder share rows).
CheckResult check_constraint3(const Scheme& s, const ColluderSets& colluders);

/// I(view ; target | cond) in units of log q for jointly linear functions of
/// a uniform source: rank(view|cond) + rank(target|cond) - rank(all|cond)
/// - rank(cond). Exact; matrices must share the column count.
long long linear_mi(const Matrix& view, const Matrix& target, const Matrix& cond);

/// Coefficient views over the stacked source [W; N] (width K*m + key_count).
Matrix server_view(const Scheme& s);                          ///< [F1 | B1]
Matrix relay_view(const Scheme& s, int u, bool survivors_only); ///< users' shares
Matrix gradient_selector(const Scheme& s);                    ///< [I | 0]
Matrix aggregate_view(const Scheme& s);                       ///< the decoded sums
Matrix colluder_view(const Scheme& s, const ColluderSets& colluders, ColluderInputMode mode);

/// I(server's received symbols ; gradients | aggregate, colluder data).
/// 0 exactly when the scheme leaks nothing beyond the sum.
long long server_security_mi(const Scheme& s, const ColluderSets& colluders,
                             ColluderInputMode mode = ColluderInputMode::HeldPieces);

/// I(relay u's received symbols ; gradients | colluder data). The two view
/// flavors (all users vs one full survivor set) span the same row space, so
/// both must be 0.
long long relay_security_mi(const Scheme& s, int u, const ColluderSets& colluders,
                            bool survivors_only = false,
                            ColluderInputMode mode = ColluderInputMode::HeldPieces);

/// Counting oracle: enumerates the whole source space (q^(K*m + key_count)
/// points, refused above `budget`), builds the joint distribution of the
/// three views and measures the conditional MI from counts alone. Validates
/// that every conditional slice is uniform with power-of-q support instead of
/// assuming it, then returns the integer number of log-q units.
long long exhaustive_mi(const Scheme& s, const Matrix& view, const Matrix& target,
                        const Matrix& cond, long long budget = 1ll << 22);

/// Decodability + security rank sweep used during construction; returns the
/// first failing check, if any.
std::optional<CheckResult> sweep_security_constraints(const Scheme& s, const BuildOptions& opt,
                                                      Rng& rng);

struct AuditOptions {
    long long sweep_cap = 10000;   ///< exhaustive scenario bound
    int sweep_samples = 1000;      ///< sampled scenarios beyond the bound
    long long oracle_budget = 1ll << 22;
    bool with_oracle = false;      ///< add counting-oracle cross-checks
    ColluderInputMode mode = ColluderInputMode::HeldPieces;
    long lprime = 1;               ///< symbol width for decode rounds
    std::optional<std::uint64_t> audit_seed; ///< defaults to a seed derived from the scheme's
};

/// Constraint 1, every max-size collusion tuple against constraints 2 and 3
/// and both security MIs, and one decode round per admissible dropout
/// pattern. Scenario spaces above the cap are sampled instead.
AuditReport audit_full(const Scheme& s, const AuditOptions& opt = {});

} // namespace hsa
