#include "hsa/fixtures.hpp"

#include <array>

#include "hsa/builder.hpp"

namespace hsa {

namespace {

struct Frac {
    long long num;
    long long den;
};

Matrix embed(const FieldCtx& f, std::size_t rows, std::size_t cols, const Frac* data) {
    Matrix m(f, rows, cols);
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c) {
            const Frac& e = data[r * cols + c];
            m(r, c) = f.from_rational(e.num, e.den);
        }
    return m;
}

constexpr Frac k_s1[16] = {
    {1, 1}, {3, 1}, {2, 1}, {1, 1},
    {5, 1}, {1, 1}, {1, 1}, {2, 1},
    {2, 1}, {4, 1}, {3, 1}, {1, 1},
    {1, 1}, {1, 1}, {3, 1}, {2, 1},
};

constexpr Frac k_f[48] = {
    {1, 1},  {1, 1}, {1, 1}, {1, 1}, {1, 1},  {1, 1},  {0, 1},  {0, 1}, {0, 1}, {0, 1}, {0, 1},  {0, 1},
    {0, 1},  {0, 1}, {0, 1}, {0, 1}, {0, 1},  {0, 1},  {1, 1},  {1, 1}, {1, 1}, {1, 1}, {1, 1},  {1, 1},
    {-1, 1}, {1, 1}, {3, 1}, {2, 1}, {1, 1},  {-1, 1}, {-7, 3}, {2, 1}, {3, 1}, {2, 1}, {-5, 3}, {-7, 3},
    {1, 1},  {3, 1}, {1, 1}, {1, 1}, {-3, 1}, {1, 1},  {3, 1},  {3, 1}, {2, 1}, {1, 1}, {1, 3},  {3, 1},
};

constexpr Frac k_f1[48] = {
    {0, 1}, {6, 1},  {8, 1},  {6, 1}, {0, 1},  {0, 1}, {4, 3},  {10, 1}, {11, 1}, {8, 1},  {0, 1},   {4, 3},
    {6, 1}, {12, 1}, {10, 1}, {9, 1}, {0, 1},  {6, 1}, {14, 3}, {9, 1},  {8, 1},  {5, 1},  {0, 1},   {14, 3},
    {0, 1}, {8, 1},  {12, 1}, {9, 1}, {2, 1},  {0, 1}, {0, 1},  {13, 1}, {15, 1}, {11, 1}, {-2, 3},  {0, 1},
    {0, 1}, {10, 1}, {12, 1}, {9, 1}, {-2, 1}, {0, 1}, {0, 1},  {13, 1}, {14, 1}, {9, 1},  {-10, 3}, {0, 1},
};

constexpr Frac k_b1[20] = {
    {1, 1},  {1, 1}, {2, 1}, {3, 1}, {3, 1},
    {-1, 1}, {2, 1}, {1, 1}, {3, 1}, {0, 1},
    {2, 1},  {1, 1}, {3, 1}, {4, 1}, {5, 1},
    {1, 1},  {2, 1}, {3, 1}, {5, 1}, {4, 1},
};

constexpr Frac k_s2_1[16] = {
    {2, 1}, {3, 1}, {1, 1}, {1, 1},
    {1, 1}, {2, 1}, {2, 1}, {1, 1},
    {1, 1}, {1, 1}, {2, 1}, {3, 1},
    {3, 1}, {1, 1}, {2, 1}, {2, 1},
};

constexpr Frac k_f2b2_1[68] = {
    {0, 1}, {6, 1},   {8, 1},   {6, 1},    {0, 1}, {0, 1}, {4, 3},  {10, 1},  {11, 1},   {8, 1},    {0, 1}, {4, 3},
    {1, 1}, {1, 1},   {2, 1},   {3, 1},    {3, 1},
    {6, 1}, {12, 1},  {10, 1},  {9, 1},    {0, 1}, {6, 1}, {14, 3}, {9, 1},   {8, 1},    {5, 1},    {0, 1}, {14, 3},
    {-1, 1}, {2, 1},  {1, 1},   {3, 1},    {0, 1},
    {2, 1}, {18, 1},  {-33, 1}, {-51, 2},  {0, 1}, {4, 1}, {5, 1},  {19, 1},  {-85, 2},  {-61, 2},  {0, 1}, {1, 1},
    {1, 1}, {3, 1},   {4, 1},   {3, 1},    {1, 1},
    {1, 1}, {-66, 1}, {16, 1},  {12, 1},   {0, 1}, {3, 1}, {2, 1},  {-66, 1}, {22, 1},   {16, 1},   {0, 1}, {3, 1},
    {4, 1}, {1, 1},   {3, 1},   {2, 1},    {1, 1},
};

constexpr Frac k_b2_2[15] = {
    {2, 1}, {1, 1}, {3, 1}, {4, 1}, {5, 1},
    {1, 1}, {2, 1}, {3, 1}, {5, 1}, {4, 1},
    {3, 1}, {5, 1}, {1, 1}, {3, 1}, {2, 1},
};

constexpr Frac k_s2_2[12] = {
    {1, 1}, {2, 1}, {1, 1},
    {2, 1}, {1, 1}, {3, 1},
    {1, 1}, {1, 1}, {1, 1},
    {3, 1}, {2, 1}, {1, 1},
};

long long count_mismatches(const Matrix& a, const Matrix& b) {
    long long bad = 0;
    for (std::size_t r = 0; r < a.rows(); ++r)
        for (std::size_t c = 0; c < a.cols(); ++c)
            if (a(r, c) != b(r, c)) ++bad;
    return bad;
}

long long count_nonzero(const Matrix& a, const std::vector<std::size_t>& cols) {
    long long bad = 0;
    for (std::size_t r = 0; r < a.rows(); ++r)
        for (std::size_t c : cols)
            if (a(r, c) != 0) ++bad;
    return bad;
}

std::vector<std::size_t> unheld_columns(const DerivedParams& p, const std::vector<int>& held) {
    std::vector<bool> has(p.K, false);
    for (int k : held) has[k] = true;
    std::vector<std::size_t> cols;
    for (int k = 0; k < p.K; ++k)
        if (!has[k])
            for (int j = 0; j < p.m; ++j) cols.push_back(p.col(k, j));
    return cols;
}

} // namespace

Assignment fixture_assignment() {
    Assignment a;
    a.K = 6;
    a.holds = {
        {{0, 2, 3, 5}, {0, 1, 5}},
        {{1, 2, 4}, {1, 2, 3, 4}, {1, 2, 3}, {2, 3, 4}},
    };
    return a;
}

Matrix fixture_S1(const FieldCtx& f) { return embed(f, 4, 4, k_s1); }
Matrix fixture_F(const FieldCtx& f) { return embed(f, 4, 12, k_f); }
Matrix fixture_F1(const FieldCtx& f) { return embed(f, 4, 12, k_f1); }
Matrix fixture_B1(const FieldCtx& f) { return embed(f, 4, 5, k_b1); }
Matrix fixture_S2_cluster1(const FieldCtx& f) { return embed(f, 4, 4, k_s2_1); }
Matrix fixture_F2B2_cluster1(const FieldCtx& f) { return embed(f, 4, 17, k_f2b2_1); }
Matrix fixture_B2_cluster2(const FieldCtx& f) { return embed(f, 3, 5, k_b2_2); }
Matrix fixture_S2_cluster2(const FieldCtx& f) { return embed(f, 4, 3, k_s2_2); }

AuditReport verify_fixture(std::uint64_t q) {
    FieldCtx f(q);
    Assignment a = fixture_assignment();
    DerivedParams p = derive_params(a, {0, 1}, {1, 1});

    Matrix s1 = fixture_S1(f);
    Matrix fm = fixture_F(f);
    Matrix f1 = fixture_F1(f);
    Matrix b1 = fixture_B1(f);
    Matrix s21 = fixture_S2_cluster1(f);
    Matrix f2b2 = fixture_F2B2_cluster1(f);
    Matrix f2 = f2b2.col_slice(0, 12);
    Matrix b21 = f2b2.col_slice(12, 17);
    Matrix b22 = fixture_B2_cluster2(f);
    Matrix s22 = fixture_S2_cluster2(f);

    AuditReport rep;
    auto zero_line = [&](std::string check, std::string sc, long long bad) {
        rep.lines.push_back({std::move(check), std::move(sc), bad, 0, bad == 0});
    };
    auto rank_line = [&](std::string check, std::string sc, const Matrix& m, long long want) {
        long long got = static_cast<long long>(m.rank());
        rep.lines.push_back({std::move(check), std::move(sc), got, want, got == want});
    };

    zero_line("fixture_a_rows", "-",
              count_mismatches(fm.row_slice(0, 2), build_aggregation_matrix(f, p)));
    zero_line("fixture_f1_product", "-", count_mismatches(s1.mul(fm), f1));

    Matrix dec = s1.inverse().row_slice(0, 2).mul(f1);
    Matrix want_dec(f, 2, 12);
    for (int k = 0; k < 6; ++k) {
        want_dec(0, k) = 1;
        want_dec(1, 6 + k) = 1;
    }
    zero_line("fixture_decode_rows", "-", count_mismatches(dec, want_dec));

    rank_line("fixture_b1_rank", "-", b1, 2);
    long long cancel_bad = s1.inverse().row_slice(0, 2).mul(b1).is_zero() ? 0 : 1;
    zero_line("fixture_key_cancel", "-", cancel_bad);

    for (int u = 0; u < 2; ++u)
        zero_line("fixture_relay_encodability", "relay=" + std::to_string(u + 1),
                  count_nonzero(f1.row_slice(2 * u, 2 * u + 2),
                                unheld_columns(p, a.cluster_datasets(u))));

    long long task_bad = count_mismatches(f2.row_slice(0, 2), f1.row_slice(0, 2)) +
                         count_mismatches(b21.row_slice(0, 2), b1.row_slice(0, 2));
    zero_line("fixture_task_rows", "cluster=1", task_bad);

    for (int v = 0; v < 2; ++v)
        zero_line("fixture_cluster_encodability", "cluster=1 user=" + std::to_string(v + 1),
                  count_nonzero(s21.row_slice(2 * v, 2 * v + 2).mul(f2),
                                unheld_columns(p, a.holds[0][v])));

    zero_line("fixture_zero_columns", "cols=5,11", count_nonzero(f2, {4, 10}));

    for (int v = 0; v < 4; ++v) {
        Matrix z = s22.row_slice(v, v + 1).mul(b22);
        rank_line("fixture_relay_stack", "relay=1 colluder=(2," + std::to_string(v + 1) + ")",
                  vstack({b21, z}), 5);
    }
    for (int v = 0; v < 2; ++v) {
        Matrix z = s21.row_slice(2 * v, 2 * v + 2).mul(b21);
        rank_line("fixture_relay_stack", "relay=2 colluder=(1," + std::to_string(v + 1) + ")",
                  vstack({b22, z}), 5);
    }
    for (int v1 = 0; v1 < 2; ++v1)
        for (int v2 = 0; v2 < 4; ++v2) {
            Matrix z1 = s21.row_slice(2 * v1, 2 * v1 + 2).mul(b21);
            Matrix z2 = s22.row_slice(v2, v2 + 1).mul(b22);
            rank_line("fixture_server_stack",
                      "colluders=(1," + std::to_string(v1 + 1) + "),(2," + std::to_string(v2 + 1) +
                          ")",
                      vstack({b1, z1, z2}), 5);
        }

    // Datasets with a cluster missing pin their virtual entries; the
    // canonical solver must land on the embedded values there.
    Matrix solved = solve_relay_demand(a, p, s1);
    long long canon_bad = 0;
    for (std::size_t c : {0u, 4u, 5u, 6u, 10u, 11u})
        for (std::size_t r = 2; r < 4; ++r)
            if (solved(r, c) != fm(r, c)) ++canon_bad;
    zero_line("fixture_canonical_columns", "-", canon_bad);

    return rep;
}

Scheme fixture_scheme(std::uint64_t q) {
    FieldCtx f(q);
    Assignment a = fixture_assignment();
    a.validate();
    DerivedParams p = derive_params(a, {0, 1}, {1, 1});
    check_feasibility(p);
    RateReport rate = rates(p);

    Matrix s1 = fixture_S1(f);
    Matrix fm = fixture_F(f);
    Matrix sinv_top = s1.inverse().row_slice(0, p.m);
    RelayCode relay{s1, fm, s1.mul(fm), fixture_B1(f), sinv_top, sinv_top.null_space_basis()};

    Matrix f2b2 = fixture_F2B2_cluster1(f);
    ClusterCode c1{0, fixture_S2_cluster1(f), f2b2.col_slice(0, 12), f2b2.col_slice(12, 17), 2};
    ClusterCode c2 = assemble_cluster_code(a, p, 1, relay, fixture_S2_cluster2(f),
                                           fixture_B2_cluster2(f).row_slice(2, 3));

    return Scheme{f, 0, a, p, rate, relay, {c1, c2}};
}

} // namespace hsa
