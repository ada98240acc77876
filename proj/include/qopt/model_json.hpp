#pragma once

// JSON form of BoundModel.

#include "qopt/bound_model.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>
#include <string>

namespace qopt {

namespace detail {

inline std::string ratio_part(const nlohmann::json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number_integer()) return std::to_string(v.get<std::int64_t>());
    throw ArgumentError("rational entries must be strings or integers");
}

inline std::vector<Ratio> parse_ratios(const nlohmann::json& arr) {
    require(arr.is_array(), "rational_weights must be an array of [p, q] pairs");
    std::vector<Ratio> out;
    for (const auto& pair : arr) {
        require(pair.is_array() && pair.size() == 2, "rational_weights entries must be [p, q] pairs");
        out.push_back(Ratio::parse(ratio_part(pair[0]), ratio_part(pair[1])));
    }
    return out;
}

inline nlohmann::json dump_ratios(const std::vector<Ratio>& r) {
    auto arr = nlohmann::json::array();
    for (const auto& x : r) arr.push_back({std::to_string(x.num), std::to_string(x.den)});
    return arr;
}

inline std::vector<double> real_list(const nlohmann::json& doc, const char* key) {
    require(doc.contains(key) && doc[key].is_array(), std::string("model needs a \"") + key + "\" array");
    std::vector<double> out;
    for (const auto& v : doc[key]) {
        require(v.is_number(), std::string("\"") + key + "\" entries must be numbers");
        out.push_back(v.get<double>());
    }
    return out;
}

inline std::vector<double> to_real(const std::vector<Ratio>& r) {
    std::vector<double> out;
    for (const auto& x : r) out.push_back(x.to_double());
    return out;
}

}  // namespace detail

inline BoundModel model_from_json(const nlohmann::json& doc) {
    using detail::require;
    require(doc.is_object(), "model document must be a JSON object");
    require(doc.contains("family") && doc["family"].is_string(), "model needs a \"family\" string");
    const Family family = family_from_string(doc["family"].get<std::string>());
    const double prefactor = doc.value("prefactor", 1.0);

    BoundModel model = [&] {
        switch (family) {
            case Family::WeightedLinear: {
                if (doc.contains("rational_weights")) {
                    auto r = detail::parse_ratios(doc["rational_weights"]);
                    if (doc.contains("lambda")) {
                        const auto lam = detail::real_list(doc, "lambda");
                        require(lam.size() == r.size(), "lambda and rational_weights differ in length");
                        for (std::size_t i = 0; i < lam.size(); ++i)
                            require(std::abs(lam[i] - r[i].to_double()) <= 1e-15 * std::abs(lam[i]),
                                    "rational_weights do not match lambda at entry " + std::to_string(i));
                    }
                    return BoundModel::weighted_linear(std::move(r), prefactor);
                }
                return BoundModel::weighted_linear(detail::real_list(doc, "lambda"), prefactor);
            }
            case Family::LegendreSqrt: return BoundModel::legendre_sqrt(detail::real_list(doc, "lambda"), prefactor);
            case Family::FactorialAlpha: return BoundModel::factorial_alpha(detail::real_list(doc, "alpha"), prefactor);
            case Family::SupAffine: {
                require(doc.contains("affine_terms") && doc["affine_terms"].is_array(),
                        "SupAffine model needs an \"affine_terms\" array");
                std::vector<AffineTerm> terms;
                for (const auto& t : doc["affine_terms"]) {
                    require(t.is_object(), "affine term must be an object");
                    AffineTerm term;
                    term.offset = t.value("offset", 0.0);
                    if (t.contains("rational_weights")) {
                        term.rational_weights = detail::parse_ratios(t["rational_weights"]);
                        term.weights = detail::to_real(*term.rational_weights);
                    } else {
                        term.weights = detail::real_list(t, "weights");
                    }
                    terms.push_back(std::move(term));
                }
                return BoundModel::sup_affine(std::move(terms), prefactor);
            }
        }
        throw ArgumentError("unknown family");
    }();

    if (doc.contains("dimension")) {
        require(doc["dimension"].is_number_integer(), "\"dimension\" must be an integer");
        require(doc["dimension"].get<std::int64_t>() == static_cast<std::int64_t>(model.dimension()),
                "\"dimension\" does not match the parameter lengths");
    }
    return model;
}

inline nlohmann::json model_to_json(const BoundModel& model) {
    nlohmann::json doc;
    doc["dimension"] = model.dimension();
    doc["family"] = std::string(to_string(model.family()));
    doc["prefactor"] = model.prefactor();
    switch (model.family()) {
        case Family::WeightedLinear:
        case Family::LegendreSqrt:
            doc["lambda"] = std::vector<double>(model.lambda().begin(), model.lambda().end());
            if (model.rational_weights()) doc["rational_weights"] = detail::dump_ratios(*model.rational_weights());
            break;
        case Family::FactorialAlpha:
            doc["alpha"] = std::vector<double>(model.alpha().begin(), model.alpha().end());
            break;
        case Family::SupAffine: {
            auto arr = nlohmann::json::array();
            for (const auto& t : model.terms()) {
                nlohmann::json term{{"offset", t.offset}, {"weights", t.weights}};
                if (t.rational_weights) term["rational_weights"] = detail::dump_ratios(*t.rational_weights);
                arr.push_back(std::move(term));
            }
            doc["affine_terms"] = std::move(arr);
            break;
        }
    }
    return doc;
}

inline BoundModel model_from_string(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ArgumentError(std::string("model JSON does not parse: ") + e.what());
    }
    try {
        return model_from_json(doc);
    } catch (const nlohmann::json::exception& e) {
        throw ArgumentError(std::string("malformed model JSON: ") + e.what());
    }
}

inline BoundModel model_from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ArgumentError("cannot open model file \"" + path + "\"");
    std::ostringstream ss;
    ss << in.rdbuf();
    return model_from_string(ss.str());
}

}  // namespace qopt
