#pragma once

// Coefficient files, JSON reports and scan CSV output.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <string>

#include <json.hpp>

#include "posicone/bounds.hpp"
#include "posicone/chpt.hpp"
#include "posicone/rays.hpp"
#include "posicone/tensor_space.hpp"

namespace posicone {

using Json = nlohmann::ordered_json;

/// Round to 12 significant digits so that printed output is stable across platforms.
inline double round12(double x) {
    if (!std::isfinite(x)) return x;
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return std::strtod(buf, nullptr);
}

inline std::string fmt12(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

class InputError : public Error {
  public:
    using Error::Error;
};

/// The 21 coefficients of the fig1-ref reference point, in m1..m21 order.
inline Vec fig1_reference_coeffs() {
    Vec c(21);
    c << 0.332, 0.022, 0.12, 0.056, 0.428, 0.086, -0.252, -0.2, 0.356, 0.12, -0.184, -0.172, -0.04, -0.05, -0.124,
        0.476, 0.12, -0.14, 0.626, -0.028, 0.332;
    return c;
}

inline WTensor fixture(const std::string &name) {
    if (name == "fig1-ref") return from_coeffs(fig1_reference_coeffs(), FlavorDim{3});
    throw InputError("unknown fixture '" + name + "'");
}

/// Unit coefficient direction (the whole orbit set to 1) for a key such as "M1112".
inline WTensor coefficient_direction(const std::string &key, int n = 3) {
    const auto keys = canonical_keys(n);
    for (std::size_t a = 0; a < keys.size(); ++a)
        if (key_name(keys[a]) == key) {
            Vec c = Vec::Zero(static_cast<Eigen::Index>(keys.size()));
            c(static_cast<Eigen::Index>(a)) = 1.0;
            return from_coeffs(c, FlavorDim{n});
        }
    throw InputError("unknown coefficient key '" + key + "'");
}

namespace detail {

inline double finite_number(const Json &v, const std::string &where) {
    if (!v.is_number()) throw InputError(where + ": expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw InputError(where + ": value is not finite");
    return x;
}

} // namespace detail

/// Two accepted shapes: {"M1111": .., ..., "M3333": ..} with exactly the 21 canonical keys,
/// or {"n": 3, "coeffs": [..]} with dim_w(n) entries in canonical order ("n" optional, default 3).
inline WTensor coefficients_from_json(const Json &j) {
    if (!j.is_object()) throw InputError("coefficient input must be a JSON object");
    if (j.contains("coeffs")) {
        int n = 3;
        for (const auto &[k, v] : j.items()) {
            if (k == "n") {
                if (!v.is_number_integer()) throw InputError("\"n\" must be an integer");
                n = v.get<int>();
            } else if (k != "coeffs") {
                throw InputError("unexpected key '" + k + "'");
            }
        }
        const Json &c = j.at("coeffs");
        if (!c.is_array()) throw InputError("\"coeffs\" must be an array");
        try {
            const FlavorDim dim(n);
            if (static_cast<long>(c.size()) != dim_w(n))
                throw InputError("\"coeffs\" has " + std::to_string(c.size()) + " entries, expected " +
                                 std::to_string(dim_w(n)));
            Vec v(static_cast<Eigen::Index>(c.size()));
            for (std::size_t a = 0; a < c.size(); ++a)
                v(static_cast<Eigen::Index>(a)) = detail::finite_number(c[a], "coeffs[" + std::to_string(a) + "]");
            return from_coeffs(v, dim);
        } catch (const InputError &) {
            throw;
        } catch (const Error &e) {
            throw InputError(e.what());
        }
    }
    const auto keys = canonical_keys(3);
    std::map<std::string, std::size_t> index;
    for (std::size_t a = 0; a < keys.size(); ++a) index[key_name(keys[a])] = a;
    Vec v(21);
    std::set<std::string> seen;
    for (const auto &[k, val] : j.items()) {
        const auto it = index.find(k);
        if (it == index.end()) throw InputError("unexpected key '" + k + "'");
        v(static_cast<Eigen::Index>(it->second)) = detail::finite_number(val, k);
        seen.insert(k);
    }
    for (const auto &[k, a] : index)
        if (!seen.count(k)) throw InputError("missing key '" + k + "'");
    return from_coeffs(v, FlavorDim{3});
}

inline WTensor coefficients_from_string(const std::string &text) {
    Json j;
    try {
        j = Json::parse(text);
    } catch (const Json::parse_error &e) {
        throw InputError(std::string("malformed JSON: ") + e.what());
    }
    return coefficients_from_json(j);
}

inline WTensor load_coefficients(const std::string &path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return coefficients_from_string(ss.str());
}

inline Json coefficients_to_json(const WTensor &m) {
    Json j = Json::object();
    const auto keys = canonical_keys(m.n());
    for (const auto &k : keys) j[key_name(k)] = round12(m(k));
    return j;
}

inline Json vec_json(const Vec &v) {
    Json a = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(round12(v(i)));
    return a;
}

inline Json mat_json(const Mat &m) {
    Json a = Json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) a.push_back(vec_json(m.row(i).transpose()));
    return a;
}

inline Json ray_json(const ExtremalRay &r) {
    return std::visit(
        [](const auto &x) -> Json {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, Type1>)
                return Json{{"type", 1}, {"alpha", vec_json(x.alpha)}};
            else if constexpr (std::is_same_v<T, Type2>)
                return Json{{"type", 2}, {"alpha", vec_json(x.alpha)}, {"beta", vec_json(x.beta)}};
            else
                return Json{{"type", 3},
                            {"frame", mat_json(x.frame)},
                            {"d", round12(x.d)},
                            {"g", round12(x.g)},
                            {"h", round12(x.h)}};
        },
        r);
}

inline Json elastic_json(const ElasticReport &e) {
    Json c = Json::array();
    for (double x : e.conditions) c.push_back(round12(x));
    return Json{{"pass", e.pass},
                {"margin", round12(e.margin)},
                {"normalized_margin", round12(e.normalized())},
                {"witness", {{"alpha", vec_json(e.alpha)}, {"beta", vec_json(e.beta)}}},
                {"conditions", c},
                {"method", to_string(e.method)}};
}

inline Json inelastic_json(const InelasticReport &r) {
    return Json{{"pass", r.pass},
                {"margin", round12(r.margin)},
                {"normalized_margin", round12(r.normalized())},
                {"witness", ray_json(r.witness)},
                {"samples", r.samples},
                {"refine_iterations", r.refine_iterations}};
}

inline Json report_json(const BoundReport &b) {
    return Json{{"verdict", to_string(b.verdict)},
                {"sampled", true},
                {"elastic", elastic_json(b.elastic)},
                {"inelastic", inelastic_json(b.inelastic)}};
}

inline Json chpt_json(const ChptReport &r) {
    return Json{{"l1", round12(r.params.l1)},
                {"l2", round12(r.params.l2)},
                {"l2_nonnegative", r.l2_nonnegative},
                {"l1_plus_l2_nonnegative", r.l1_plus_l2_nonnegative},
                {"analytic_pass", r.analytic_pass},
                {"numerical_agrees", r.agree},
                {"report", report_json(r.bounds)}};
}

inline void write_region_csv(std::ostream &os, const RegionResult &r) {
    os << "delta1,delta2,status,elastic_margin,inelastic_margin\n";
    for (const auto &c : r.cells)
        os << fmt12(c.delta1) << ',' << fmt12(c.delta2) << ',' << static_cast<int>(c.status) << ','
           << fmt12(c.elastic_margin) << ',' << fmt12(c.inelastic_margin) << '\n';
}

} // namespace posicone
