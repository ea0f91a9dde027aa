#pragma once

#include <initializer_list>
#include <string>
#include <tuple>
#include <utility>

#include <json.hpp>

#include "icsim/distributions.hpp"
#include "icsim/errors.hpp"

// Distribution specs as JSON objects {variant, d, rho|beta, j|pair}; the
// harness config format embeds these under a "dist" key.

namespace icsim {

inline nlohmann::json spec_to_json(const HideSeekV1Spec& s) {
    return {{"variant", "hideseek-v1"}, {"d", s.d}, {"rho", s.rho}, {"j", s.j}};
}

inline nlohmann::json spec_to_json(const HideSeekV2Spec& s) {
    return {{"variant", "hideseek-v2"}, {"d", s.d}, {"rho", s.rho}, {"j", s.j}};
}

inline nlohmann::json spec_to_json(const BanditLossSpec& s) {
    return {{"variant", "bandit-loss"}, {"d", s.d}, {"rho", s.rho}, {"j", s.j}};
}

inline nlohmann::json spec_to_json(const SparsePcaSpec& s) {
    return {{"variant", "sparse-pca"}, {"d", s.d}, {"rho", s.rho}, {"pair", {s.pair_i, s.pair_j}}};
}

inline nlohmann::json spec_to_json(const MatrixOptSpec& s) {
    return {{"variant", "matrix-opt"}, {"d", s.d}, {"beta", s.beta}, {"pair", {s.pair_i, s.pair_j}}};
}

namespace detail {

inline void check_spec_keys(const nlohmann::json& j, std::initializer_list<const char*> allowed) {
    if (!j.is_object()) throw ConfigError("dist: expected a JSON object");
    for (const auto& [key, value] : j.items()) {
        bool ok = false;
        for (const char* a : allowed) ok = ok || key == a;
        if (!ok) throw ConfigError("dist: unknown key \"" + key + "\"");
    }
}

inline void check_variant(const nlohmann::json& j, const char* want) {
    if (!j.contains("variant") || !j["variant"].is_string())
        throw ConfigError("dist: missing string \"variant\"");
    if (j["variant"].get<std::string>() != want)
        throw ConfigError("dist: expected variant \"" + std::string(want) + "\", got \"" +
                          j["variant"].get<std::string>() + "\"");
}

template <typename T>
T spec_field(const nlohmann::json& j, const char* key, T fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j[key].get<T>();
    } catch (const nlohmann::json::exception&) {
        throw ConfigError("dist: bad value for \"" + std::string(key) + "\"");
    }
}

inline std::pair<int, int> spec_pair(const nlohmann::json& j, int fi, int fj) {
    if (!j.contains("pair")) return {fi, fj};
    const auto& p = j["pair"];
    if (!p.is_array() || p.size() != 2) throw ConfigError("dist: \"pair\" must be [i, j]");
    try {
        return {p[0].get<int>(), p[1].get<int>()};
    } catch (const nlohmann::json::exception&) {
        throw ConfigError("dist: bad value in \"pair\"");
    }
}

}  // namespace detail

inline HideSeekV1Spec v1_spec_from_json(const nlohmann::json& j) {
    detail::check_spec_keys(j, {"variant", "d", "rho", "j"});
    detail::check_variant(j, "hideseek-v1");
    HideSeekV1Spec s;
    s.d = detail::spec_field(j, "d", s.d);
    s.rho = detail::spec_field(j, "rho", s.rho);
    s.j = detail::spec_field(j, "j", s.j);
    return s;
}

inline HideSeekV2Spec v2_spec_from_json(const nlohmann::json& j) {
    detail::check_spec_keys(j, {"variant", "d", "rho", "j"});
    detail::check_variant(j, "hideseek-v2");
    HideSeekV2Spec s;
    s.d = detail::spec_field(j, "d", s.d);
    s.rho = detail::spec_field(j, "rho", s.rho);
    s.j = detail::spec_field(j, "j", s.j);
    return s;
}

inline BanditLossSpec bandit_spec_from_json(const nlohmann::json& j) {
    detail::check_spec_keys(j, {"variant", "d", "rho", "j"});
    detail::check_variant(j, "bandit-loss");
    BanditLossSpec s;
    s.d = detail::spec_field(j, "d", s.d);
    s.rho = detail::spec_field(j, "rho", s.rho);
    s.j = detail::spec_field(j, "j", s.j);
    return s;
}

inline SparsePcaSpec pca_spec_from_json(const nlohmann::json& j) {
    detail::check_spec_keys(j, {"variant", "d", "rho", "pair"});
    detail::check_variant(j, "sparse-pca");
    SparsePcaSpec s;
    s.d = detail::spec_field(j, "d", s.d);
    s.rho = detail::spec_field(j, "rho", s.rho);
    std::tie(s.pair_i, s.pair_j) = detail::spec_pair(j, s.pair_i, s.pair_j);
    return s;
}

inline MatrixOptSpec matrixopt_spec_from_json(const nlohmann::json& j) {
    detail::check_spec_keys(j, {"variant", "d", "beta", "pair"});
    detail::check_variant(j, "matrix-opt");
    MatrixOptSpec s;
    s.d = detail::spec_field(j, "d", s.d);
    s.beta = detail::spec_field(j, "beta", s.beta);
    std::tie(s.pair_i, s.pair_j) = detail::spec_pair(j, s.pair_i, s.pair_j);
    return s;
}

}  // namespace icsim
