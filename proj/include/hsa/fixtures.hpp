#pragma once

#include "hsa/audit.hpp"

namespace hsa {

/// Reference two-cluster instance: K = 6, V = (2, 4), s2 = (0, 1),
/// T = (1, 1). Dataset ids below are 0-based.
Assignment fixture_assignment();

/// Embedded matrices, rational entries mapped into F_q. q must not divide
/// any embedded denominator (only 3 and 2 appear).
Matrix fixture_S1(const FieldCtx& f);
Matrix fixture_F(const FieldCtx& f);
Matrix fixture_F1(const FieldCtx& f);
Matrix fixture_B1(const FieldCtx& f);
Matrix fixture_S2_cluster1(const FieldCtx& f);
Matrix fixture_F2B2_cluster1(const FieldCtx& f); ///< 4 x 17, [F2 | B2]
Matrix fixture_B2_cluster2(const FieldCtx& f);
/// Sampling matrix the reference tables leave unspecified; this choice keeps
/// every 3-row survivor stack invertible for the moduli under test.
Matrix fixture_S2_cluster2(const FieldCtx& f);

/// Re-checks every published identity over F_q: the aggregation-row
/// pattern, F1 = S1 F, decoder rows, rank / cancellation of B1, all
/// encodability zero patterns, task-row inheritance, the relay- and
/// server-collusion stack ranks, and that the canonical solver reproduces
/// the determined columns of F.
AuditReport verify_fixture(std::uint64_t q = 101);

/// Full Scheme carrying the embedded matrices. The one block the tables do
/// not pin down (cluster 2's task matrix) is regenerated canonically.
Scheme fixture_scheme(std::uint64_t q = 101);

} // namespace hsa
