#pragma once

#include "qakns/hierarchy.hpp"
#include "qakns/tau.hpp"

#include "json.hpp"

#include <optional>
#include <string>
#include <vector>

namespace qakns {

struct Truncation {
    int nx = 14; // N_x
    int nz = 12; // N_z
    int nd = 4;  // N_D
    int nt = 10; // total time weight for tau data
    int k = 12;  // dressing depth for the bilinear checks
    int j = 7;   // resolvent depth
};

struct TauSpec {
    std::vector<std::string> families{"vacuum", "h1", "h2", "h3"};
    std::optional<TauFamily> custom;
    int nx = 8;
    int kmax = 4;
    int nz = 14;
    int l_max = 4;
};

struct RunConfig {
    std::string name = "default";
    std::vector<Scalar> a;
    Scalar q{2};
    bool classical = false; // run the hierarchy under d/dx instead of D_q
    // U entries as x-coefficient lists, row major
    std::vector<std::vector<std::vector<Scalar>>> u;
    Truncation trunc;
    std::vector<FlowIndex> flows{{1, 0}, {1, 1}, {2, 0}};
    int lambda_max = 2;
    int l_max = 4;
    int pairing_pairs = 24;
    unsigned seed = 1;
    std::vector<Scalar> pairing_qs{Scalar(2), Scalar(1, 2), Scalar(3, 5)};
    std::vector<int> limit_ms{3, 4, 5, 6};
    TauSpec tau;
    std::vector<std::string> checks{"q_calculus", "pairing", "hierarchy", "bilinear", "tau", "classical"};

    int n() const { return static_cast<int>(a.size()); }
    LaxData lax() const;
};

// Parses and validates; rationals are "p/q" strings (integers may be plain numbers).
RunConfig parse_config(const nlohmann::json& j);
RunConfig load_config(const std::string& path);
// Canonical form: every field, rationals normalized.
nlohmann::json to_json(const RunConfig& c);
// SHA-256 of the canonical form.
std::string config_hash(const RunConfig& c);

// n = 2, A = diag(1, -1), q = 2 with the given U.
RunConfig builtin_config(const std::string& name);

} // namespace qakns
