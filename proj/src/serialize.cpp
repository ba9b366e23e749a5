#include "hsa/serialize.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>

#include <json.hpp>

namespace hsa {

namespace {

std::string trimmed(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

long long to_int(const std::string& tok, const std::string& where) {
    std::size_t used = 0;
    long long v = 0;
    try {
        v = std::stoll(tok, &used);
    } catch (const std::exception&) {
        raise(Errc::ParseError, "expected an integer in " + where + ", got '" + tok + "'");
    }
    if (used != tok.size())
        raise(Errc::ParseError, "trailing junk after integer in " + where + ": '" + tok + "'");
    return v;
}

std::vector<std::string> split_ws(const std::string& s) {
    std::istringstream in(s);
    std::vector<std::string> out;
    std::string tok;
    while (in >> tok) out.push_back(tok);
    return out;
}

std::vector<int> to_int_list(const std::vector<std::string>& toks, std::size_t from,
                             const std::string& where) {
    std::vector<int> out;
    for (std::size_t i = from; i < toks.size(); ++i)
        out.push_back(static_cast<int>(to_int(toks[i], where)));
    return out;
}

void print_matrix(std::ostream& os, const std::string& name, const Matrix& m) {
    os << "matrix " << name << " " << m.rows() << " " << m.cols() << "\n";
    for (std::size_t r = 0; r < m.rows(); ++r) {
        for (std::size_t c = 0; c < m.cols(); ++c) {
            if (c) os << " ";
            os << m(r, c);
        }
        os << "\n";
    }
}

struct TokenReader {
    std::istringstream in;
    explicit TokenReader(const std::string& text) : in(text) {}

    std::string next(const std::string& what) {
        std::string tok;
        if (!(in >> tok)) raise(Errc::ParseError, "scheme dump ended early, wanted " + what);
        return tok;
    }
    void expect(const std::string& word) {
        std::string tok = next("'" + word + "'");
        if (tok != word)
            raise(Errc::ParseError, "scheme dump: wanted '" + word + "', got '" + tok + "'");
    }
    long long integer(const std::string& what) { return to_int(next(what), what); }

    Matrix matrix(const FieldCtx& f, const std::string& name, std::size_t rows, std::size_t cols) {
        expect("matrix");
        expect(name);
        auto r = static_cast<std::size_t>(integer(name + " rows"));
        auto c = static_cast<std::size_t>(integer(name + " cols"));
        if (r != rows || c != cols)
            raise(Errc::ParseError, "matrix " + name + " is " + std::to_string(r) + "x" +
                                        std::to_string(c) + ", wanted " + std::to_string(rows) +
                                        "x" + std::to_string(cols));
        Matrix m(f, rows, cols);
        for (std::size_t i = 0; i < rows; ++i)
            for (std::size_t j = 0; j < cols; ++j) m(i, j) = f.from_int(integer(name + " entry"));
        return m;
    }
};

} // namespace

ScenarioConfig parse_config(const std::string& text) {
    ScenarioConfig cfg;
    std::map<std::pair<int, int>, std::vector<int>> users;
    std::map<int, std::vector<int>> drops;
    std::map<std::string, std::vector<std::string>> fields;

    std::istringstream in(text);
    std::string raw;
    int lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        std::string line = raw.substr(0, raw.find('#'));
        line = trimmed(line);
        if (line.empty()) continue;
        std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            raise(Errc::ParseError, "line " + std::to_string(lineno) + ": expected 'key = value'");
        std::vector<std::string> head = split_ws(line.substr(0, eq));
        std::vector<std::string> vals = split_ws(line.substr(eq + 1));
        std::string where = "line " + std::to_string(lineno);
        if (head.empty()) raise(Errc::ParseError, where + ": missing key");
        if (head[0] == "user") {
            if (head.size() != 3) raise(Errc::ParseError, where + ": want 'user U V = ids'");
            int u = static_cast<int>(to_int(head[1], where));
            int v = static_cast<int>(to_int(head[2], where));
            if (u < 1 || v < 1) raise(Errc::ParseError, where + ": user ids are 1-based");
            if (!users.emplace(std::make_pair(u, v), to_int_list(vals, 0, where)).second)
                raise(Errc::ParseError, where + ": duplicate user");
        } else if (head[0] == "drop") {
            if (head.size() != 2) raise(Errc::ParseError, where + ": want 'drop U = ids'");
            int u = static_cast<int>(to_int(head[1], where));
            if (u < 1) raise(Errc::ParseError, where + ": cluster ids are 1-based");
            if (!drops.emplace(u, to_int_list(vals, 0, where)).second)
                raise(Errc::ParseError, where + ": duplicate drop line");
        } else {
            if (head.size() != 1) raise(Errc::ParseError, where + ": unknown key form");
            if (!fields.emplace(head[0], vals).second)
                raise(Errc::ParseError, where + ": duplicate key " + head[0]);
        }
    }

    auto take_one = [&](const std::string& key, long long lo, long long hi,
                        std::optional<long long> dflt) -> long long {
        auto it = fields.find(key);
        if (it == fields.end()) {
            if (!dflt) raise(Errc::ParseError, "missing required key " + key);
            return *dflt;
        }
        if (it->second.size() != 1)
            raise(Errc::ParseError, "key " + key + " takes one value");
        long long v = to_int(it->second[0], key);
        if (v < lo || v > hi) raise(Errc::ParseError, "key " + key + " out of range");
        fields.erase(it);
        return v;
    };

    cfg.q = static_cast<std::uint64_t>(take_one("q", 2, (1ll << 62) - 1, 101));
    cfg.seed = static_cast<std::uint64_t>(
        take_one("seed", 0, std::numeric_limits<long long>::max(), 1));
    cfg.lprime = static_cast<long>(take_one("lprime", 1, 1 << 20, 1));
    cfg.sweep_cap = take_one("sweep_cap", 1, 1ll << 40, 10000);
    cfg.sweep_samples = static_cast<int>(take_one("sweep_samples", 1, 1 << 20, 1000));
    int K = static_cast<int>(take_one("K", 1, 1 << 20, std::nullopt));

    if (users.empty()) raise(Errc::ParseError, "no user lines");
    int U = 0;
    for (const auto& [uv, ids] : users) U = std::max(U, uv.first);
    std::vector<int> V(U, 0);
    for (const auto& [uv, ids] : users) V[uv.first - 1] = std::max(V[uv.first - 1], uv.second);
    cfg.assignment.K = K;
    cfg.assignment.holds.assign(U, {});
    for (int u = 1; u <= U; ++u) {
        cfg.assignment.holds[u - 1].resize(V[u - 1]);
        for (int v = 1; v <= V[u - 1]; ++v) {
            auto it = users.find({u, v});
            if (it == users.end())
                raise(Errc::ParseError, "missing user " + std::to_string(u) + " " +
                                            std::to_string(v) + " line");
            std::vector<int> ids = it->second;
            for (int& k : ids) {
                if (k < 1 || k > K)
                    raise(Errc::ParseError, "dataset id out of range for user " +
                                                std::to_string(u) + " " + std::to_string(v));
                --k;
            }
            std::sort(ids.begin(), ids.end());
            ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
            cfg.assignment.holds[u - 1][v - 1] = std::move(ids);
        }
    }
    cfg.assignment.validate();

    auto take_list = [&](const std::string& key) -> std::vector<int> {
        auto it = fields.find(key);
        if (it == fields.end()) return std::vector<int>(U, 0);
        std::vector<int> v = to_int_list(it->second, 0, key);
        if (static_cast<int>(v.size()) != U)
            raise(Errc::ParseError, "key " + key + " needs one value per cluster");
        fields.erase(it);
        return v;
    };
    cfg.s2 = take_list("s2");
    cfg.T = take_list("T");

    if (!drops.empty()) {
        cfg.dropouts.assign(U, {});
        for (const auto& [u, ids] : drops) {
            if (u > U) raise(Errc::ParseError, "drop line for unknown cluster");
            std::vector<int> vs = ids;
            for (int& v : vs) {
                if (v < 1 || v > V[u - 1])
                    raise(Errc::ParseError, "drop line user id out of range");
                --v;
            }
            std::sort(vs.begin(), vs.end());
            vs.erase(std::unique(vs.begin(), vs.end()), vs.end());
            cfg.dropouts[u - 1] = std::move(vs);
        }
    }

    auto it = fields.find("V");
    if (it != fields.end()) {
        std::vector<int> declared = to_int_list(it->second, 0, "V");
        std::vector<int> actual(V.begin(), V.end());
        if (declared != actual) raise(Errc::ParseError, "declared V disagrees with user lines");
        fields.erase(it);
    }
    it = fields.find("U");
    if (it != fields.end()) {
        if (to_int(it->second.at(0), "U") != U)
            raise(Errc::ParseError, "declared U disagrees with user lines");
        fields.erase(it);
    }
    if (!fields.empty()) raise(Errc::ParseError, "unknown key " + fields.begin()->first);
    return cfg;
}

std::string scheme_text(const Scheme& s) {
    std::ostringstream os;
    os << "hsa-scheme 1\n";
    os << "q " << s.field.q() << "\n";
    os << "seed " << s.seed << "\n";
    os << "K " << s.params.K << "\n";
    os << "U " << s.params.U << "\n";
    os << "V";
    for (int v : s.params.V) os << " " << v;
    os << "\ns2";
    for (int v : s.params.s2) os << " " << v;
    os << "\nT";
    for (int v : s.params.T) os << " " << v;
    os << "\n";
    for (int u = 0; u < s.params.U; ++u)
        for (int v = 0; v < s.params.V[u]; ++v) {
            const auto& ids = s.assignment.holds[u][v];
            os << "holds " << (u + 1) << " " << (v + 1) << " " << ids.size();
            for (int k : ids) os << " " << (k + 1);
            os << "\n";
        }
    print_matrix(os, "S1", s.relay.S1);
    print_matrix(os, "F", s.relay.F);
    print_matrix(os, "B1", s.relay.B1);
    for (int u = 0; u < s.params.U; ++u) {
        const ClusterCode& cc = s.clusters[u];
        std::string tag = "." + std::to_string(u + 1);
        print_matrix(os, "S2" + tag, cc.S2);
        print_matrix(os, "F2" + tag, cc.F2);
        print_matrix(os, "B2" + tag, cc.B2);
    }
    os << "end\n";
    return os.str();
}

Scheme parse_scheme(const std::string& text) {
    TokenReader rd(text);
    rd.expect("hsa-scheme");
    rd.expect("1");
    rd.expect("q");
    FieldCtx f(static_cast<std::uint64_t>(rd.integer("q")));
    rd.expect("seed");
    auto seed = static_cast<std::uint64_t>(rd.integer("seed"));
    rd.expect("K");
    int K = static_cast<int>(rd.integer("K"));
    rd.expect("U");
    int U = static_cast<int>(rd.integer("U"));
    if (K < 1 || U < 1) raise(Errc::ParseError, "scheme dump: bad K or U");
    rd.expect("V");
    std::vector<int> V(U);
    for (int& v : V) v = static_cast<int>(rd.integer("V"));
    rd.expect("s2");
    std::vector<int> s2(U);
    for (int& v : s2) v = static_cast<int>(rd.integer("s2"));
    rd.expect("T");
    std::vector<int> T(U);
    for (int& v : T) v = static_cast<int>(rd.integer("T"));

    Assignment a;
    a.K = K;
    a.holds.assign(U, {});
    for (int u = 0; u < U; ++u) a.holds[u].resize(V[u]);
    for (int u = 1; u <= U; ++u)
        for (int v = 1; v <= (u <= U ? V[u - 1] : 0); ++v) {
            rd.expect("holds");
            if (rd.integer("cluster id") != u || rd.integer("user id") != v)
                raise(Errc::ParseError, "scheme dump: holds lines out of order");
            auto n = rd.integer("holds count");
            std::vector<int> ids;
            for (long long i = 0; i < n; ++i)
                ids.push_back(static_cast<int>(rd.integer("dataset id")) - 1);
            a.holds[u - 1][v - 1] = std::move(ids);
        }
    a.validate();
    DerivedParams p = derive_params(a, s2, T);
    RateReport rate = rates(p);

    std::size_t n1 = p.relay_rows();
    Matrix S1 = rd.matrix(f, "S1", n1, n1);
    Matrix F = rd.matrix(f, "F", n1, p.gradient_dim());
    Matrix B1 = rd.matrix(f, "B1", n1, static_cast<std::size_t>(rate.key_count));
    Matrix sinv_top = S1.inverse().row_slice(0, p.m);
    RelayCode relay{S1, F, S1.mul(F), B1, sinv_top, sinv_top.null_space_basis()};

    std::vector<ClusterCode> clusters;
    for (int u = 0; u < U; ++u) {
        std::string tag = "." + std::to_string(u + 1);
        std::size_t d = p.user_rows(u);
        std::size_t n2 = p.cluster_code_rows(u);
        Matrix S2 = rd.matrix(f, "S2" + tag, static_cast<std::size_t>(V[u]) * d, n2);
        Matrix F2 = rd.matrix(f, "F2" + tag, n2, p.gradient_dim());
        Matrix B2 = rd.matrix(f, "B2" + tag, n2, static_cast<std::size_t>(rate.key_count));
        clusters.push_back(ClusterCode{u, std::move(S2), std::move(F2), std::move(B2), d});
    }
    rd.expect("end");
    return Scheme{f, seed, std::move(a), std::move(p), rate, std::move(relay),
                  std::move(clusters)};
}

std::string transcript_text(const Scheme& s, const Transcript& t) {
    std::ostringstream os;
    for (int u = 0; u < s.params.U; ++u) {
        os << "survivors " << (u + 1) << " :";
        for (int v : t.survivors[u]) os << " " << (v + 1);
        os << "\nused " << (u + 1) << " :";
        for (int v : t.used[u]) os << " " << (v + 1);
        os << "\n";
    }
    for (int u = 0; u < s.params.U; ++u)
        for (int v = 0; v < s.params.V[u]; ++v) {
            os << "X " << (u + 1) << " " << (v + 1) << " :";
            const Matrix& x = t.X[u][v];
            bool sent = std::binary_search(t.survivors[u].begin(), t.survivors[u].end(), v);
            if (!sent || x.rows() == 0) {
                os << " -\n";
                continue;
            }
            for (std::size_t r = 0; r < x.rows(); ++r)
                for (std::size_t c = 0; c < x.cols(); ++c) os << " " << x(r, c);
            os << "\n";
        }
    for (int u = 0; u < s.params.U; ++u) {
        os << "Y " << (u + 1) << " :";
        for (std::size_t r = 0; r < t.Y[u].rows(); ++r)
            for (std::size_t c = 0; c < t.Y[u].cols(); ++c) os << " " << t.Y[u](r, c);
        os << "\n";
    }
    os << "decoded " << t.decoded.rows() << " " << t.decoded.cols() << "\n";
    for (std::size_t r = 0; r < t.decoded.rows(); ++r) {
        for (std::size_t c = 0; c < t.decoded.cols(); ++c) {
            if (c) os << " ";
            os << t.decoded(r, c);
        }
        os << "\n";
    }
    return os.str();
}

std::string report_text(const AuditReport& r) {
    std::ostringstream os;
    for (const CheckResult& l : r.lines)
        os << (l.pass ? "[PASS] " : "[FAIL] ") << l.check << " " << l.scenario
           << " measured=" << l.measured << " expected=" << l.expected << "\n";
    os << (r.ok() ? "audit: all checks passed" : "audit: FAILURES present") << " ("
       << r.lines.size() << " checks)\n";
    return os.str();
}

std::string report_json(const AuditReport& r) {
    nlohmann::json j;
    j["ok"] = r.ok();
    j["checks"] = nlohmann::json::array();
    for (const CheckResult& l : r.lines)
        j["checks"].push_back({{"check", l.check},
                               {"scenario", l.scenario},
                               {"measured", l.measured},
                               {"expected", l.expected},
                               {"pass", l.pass}});
    return j.dump(2) + "\n";
}

std::string rates_text(const DerivedParams& p, const RateReport& r) {
    std::ostringstream os;
    os << "R1=" << r.R1.str() << " R2=[";
    for (int u = 0; u < p.U; ++u) {
        if (u) os << ", ";
        os << r.R2[u].str();
    }
    os << "] RZ=" << r.RZ.str() << " keys=" << r.key_count << "\n";
    os << "feasible yes\n";
    bool tight = r.R1 == Rational(1, p.m1);
    for (int u = 0; u < p.U; ++u)
        tight = tight && r.R2[u] == Rational(1, static_cast<long long>(p.m1) * p.m2[u]);
    os << (tight ? "boundary tight: R1 = 1/m1, R2[u] = 1/(m1*m2[u])\n"
                 : "boundary NOT tight\n");
    return os.str();
}

std::string rates_json(const DerivedParams& p, const RateReport& r) {
    nlohmann::json j;
    j["R1"] = r.R1.str();
    j["R2"] = nlohmann::json::array();
    for (int u = 0; u < p.U; ++u) j["R2"].push_back(r.R2[u].str());
    j["RZ"] = r.RZ.str();
    j["keys"] = r.key_count;
    j["feasible"] = true;
    return j.dump(2) + "\n";
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(Errc::IoError, "cannot open " + path + " for reading");
    std::ostringstream os;
    os << in.rdbuf();
    if (in.bad()) raise(Errc::IoError, "read failed on " + path);
    return os.str();
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) raise(Errc::IoError, "cannot open " + path + " for writing");
    out << text;
    out.flush();
    if (!out) raise(Errc::IoError, "write failed on " + path);
}

} // namespace hsa
