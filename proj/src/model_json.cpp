#include "citesim/model_json.hpp"

#include <set>

#include <fmt/format.h>
#include <json.hpp>

#include "citesim/errors.hpp"

namespace citesim::model_json {

namespace {

using nlohmann::json;

void check_keys(const json& j, const std::set<std::string>& allowed) {
    for (const auto& [key, value] : j.items()) {
        if (!allowed.count(key)) {
            throw ValidationError(fmt::format("model json: unknown key '{}'", key));
        }
    }
}

double num(const json& j, const char* key, double fallback) {
    if (!j.contains(key)) return fallback;
    const json& v = j.at(key);
    if (!v.is_number()) throw ValidationError(fmt::format("model json: '{}' must be a number", key));
    return v.get<double>();
}

std::int64_t integer(const json& j, const char* key, std::int64_t fallback) {
    if (!j.contains(key)) return fallback;
    const json& v = j.at(key);
    if (!v.is_number_integer()) {
        throw ValidationError(fmt::format("model json: '{}' must be an integer", key));
    }
    return v.get<std::int64_t>();
}

models::MixingDistribution parse_mixing(const json& j) {
    if (!j.is_object()) throw ValidationError("model json: 'xi' must be an object");
    if (j.contains("atoms")) {
        check_keys(j, {"atoms"});
        const json& arr = j.at("atoms");
        if (!arr.is_array()) throw ValidationError("model json: 'xi.atoms' must be an array");
        models::AtomMixture mix;
        for (const json& entry : arr) {
            if (!entry.is_array() || entry.size() != 2 || !entry[0].is_number() ||
                !entry[1].is_number()) {
                throw ValidationError("model json: each atom must be a [q, weight] pair");
            }
            mix.atoms.push_back({entry[0].get<double>(), entry[1].get<double>()});
        }
        return mix;
    }
    check_keys(j, {"s", "b"});
    return models::BetaLike{num(j, "s", 1.0), num(j, "b", 1.0)};
}

json mixing_to_json(const models::MixingDistribution& xi) {
    if (const auto* am = std::get_if<models::AtomMixture>(&xi)) {
        json atoms = json::array();
        for (const models::Atom& a : am->atoms) atoms.push_back({a.q, a.weight});
        return json{{"atoms", atoms}};
    }
    const auto& bl = std::get<models::BetaLike>(xi);
    return json{{"s", bl.s}, {"b", bl.b}};
}

}  // namespace

models::ModelSpec parse_model(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ValidationError(fmt::format("model json: {}", e.what()));
    }
    if (!j.is_object() || !j.contains("family") || !j.at("family").is_string()) {
        throw ValidationError("model json: needs a 'family' string key");
    }
    const std::string family = j.at("family").get<std::string>();

    models::ModelSpec model;
    if (family == "geometric") {
        check_keys(j, {"family", "q"});
        model = models::GeometricParams{num(j, "q", 0.5)};
    } else if (family == "truncated_geometric") {
        check_keys(j, {"family", "q", "m"});
        model = models::TruncatedGeometricParams{num(j, "q", 0.5), integer(j, "m", 1)};
    } else if (family == "citation") {
        check_keys(j, {"family", "a", "p"});
        model = models::CitationParams{num(j, "a", 0.0), num(j, "p", 1.0)};
    } else if (family == "author") {
        check_keys(j, {"family", "a", "p", "q"});
        model = models::AuthorModelParams{num(j, "a", 0.0), num(j, "p", 1.0), num(j, "q", 0.5)};
    } else if (family == "field") {
        check_keys(j, {"family", "lambda", "a", "p", "q"});
        model = models::FieldModelParams{num(j, "lambda", 1.0), num(j, "a", 0.0),
                                         num(j, "p", 1.0), num(j, "q", 0.5)};
    } else if (family == "discrete_stable") {
        check_keys(j, {"family", "lambda", "gamma", "q"});
        model = models::DiscreteStableParams{num(j, "lambda", 1.0), num(j, "gamma", 1.0),
                                             num(j, "q", 1.0)};
    } else if (family == "normalizer") {
        check_keys(j, {"family", "u", "q"});
        model = models::NormalizerParams{num(j, "u", 0.5), num(j, "q", 0.5)};
    } else if (family == "elite") {
        check_keys(j, {"family", "lambda", "gamma", "xi"});
        models::EliteModelParams params;
        params.lambda = num(j, "lambda", 1.0);
        params.gamma = num(j, "gamma", 1.0);
        if (j.contains("xi")) params.xi = parse_mixing(j.at("xi"));
        model = params;
    } else {
        throw ValidationError(fmt::format("model json: unknown family '{}'", family));
    }
    models::validate(model);
    return model;
}

std::string to_json(const models::ModelSpec& model) {
    json j;
    j["family"] = models::family_name(model);
    if (const auto* m = std::get_if<models::GeometricParams>(&model)) {
        j["q"] = m->q;
    } else if (const auto* m = std::get_if<models::TruncatedGeometricParams>(&model)) {
        j["q"] = m->q;
        j["m"] = m->m;
    } else if (const auto* m = std::get_if<models::CitationParams>(&model)) {
        j["a"] = m->a;
        j["p"] = m->p;
    } else if (const auto* m = std::get_if<models::AuthorModelParams>(&model)) {
        j["a"] = m->a;
        j["p"] = m->p;
        j["q"] = m->q;
    } else if (const auto* m = std::get_if<models::FieldModelParams>(&model)) {
        j["lambda"] = m->lambda;
        j["a"] = m->a;
        j["p"] = m->p;
        j["q"] = m->q;
    } else if (const auto* m = std::get_if<models::DiscreteStableParams>(&model)) {
        j["lambda"] = m->lambda;
        j["gamma"] = m->gamma;
        j["q"] = m->q;
    } else if (const auto* m = std::get_if<models::NormalizerParams>(&model)) {
        j["u"] = m->u;
        j["q"] = m->q;
    } else if (const auto* m = std::get_if<models::EliteModelParams>(&model)) {
        j["lambda"] = m->lambda;
        j["gamma"] = m->gamma;
        j["xi"] = mixing_to_json(m->xi);
    }
    return j.dump();
}

}  // namespace citesim::model_json
