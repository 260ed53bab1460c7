#include <json.hpp>

#include "knnlab/errors.hpp"
#include "knnlab/metric_space.hpp"

namespace knnlab {

namespace {

using nlohmann::json;

json space_to_json_obj(const SpaceHandle& s) {
    json j;
    switch (s.family) {
        case Family::Euclidean: {
            j["family"] = "euclidean";
            if (s.mixture) {
                j["mixture"] = {{"class0", {s.mixture->lo0, s.mixture->hi0}},
                                {"class1", {s.mixture->lo1, s.mixture->hi1}},
                                {"prior1", s.mixture->prior1}};
            }
            break;
        }
        case Family::Ultrametric:
        case Family::CantorTies: {
            j["family"] = s.family == Family::Ultrametric ? "ultrametric" : "cantor-ties";
            j["alphabet"] = s.ultra->alphabet;
            if (!s.ultra->eta_first.empty()) j["eta_first"] = s.ultra->eta_first;
            break;
        }
        case Family::Preiss: {
            j["family"] = "preiss";
            j["levels"] = s.preiss->levels;
            break;
        }
        case Family::Hub: {
            j["family"] = "hub";
            j["variant"] = s.hub->kind == HubParams::Kind::Pow2 ? "pow2" : "geometric";
            if (s.hub->kind == HubParams::Kind::Geometric) j["alpha"] = s.hub->alpha;
            break;
        }
        case Family::L1Sum: {
            j["family"] = "l1sum";
            j["left"] = space_to_json_obj(*s.left);
            break;
        }
    }
    if (std::isfinite(s.scale)) j["scale"] = s.scale;
    return j;
}

SpaceHandle space_from_json_obj(const json& j) {
    if (!j.is_object() || !j.contains("family")) throw ConfigError("space config: missing family tag");
    const std::string family = j.at("family").get<std::string>();
    SpaceHandle s;
    if (family == "euclidean") {
        std::optional<MixtureParams> mixture;
        if (j.contains("mixture")) {
            const json& m = j.at("mixture");
            MixtureParams p;
            p.lo0 = m.at("class0").at(0).get<double>();
            p.hi0 = m.at("class0").at(1).get<double>();
            p.lo1 = m.at("class1").at(0).get<double>();
            p.hi1 = m.at("class1").at(1).get<double>();
            p.prior1 = m.value("prior1", 0.5);
            mixture = p;
        }
        s = make_euclidean_space(mixture);
    } else if (family == "ultrametric" || family == "cantor-ties") {
        UltraParams p;
        p.alphabet = j.at("alphabet").get<std::vector<std::uint32_t>>();
        if (j.contains("eta_first")) p.eta_first = j.at("eta_first").get<std::vector<double>>();
        s = make_ultrametric_space(std::move(p));
        if (family == "cantor-ties") s.family = Family::CantorTies;
    } else if (family == "preiss") {
        s = make_preiss_space(j.at("levels").get<std::size_t>());
    } else if (family == "hub") {
        const std::string variant = j.value("variant", "pow2");
        if (variant == "pow2") {
            s = make_hub_space(HubParams::Kind::Pow2);
        } else if (variant == "geometric") {
            s = make_hub_space(HubParams::Kind::Geometric, j.at("alpha").get<double>());
        } else {
            throw ConfigError("space config: unknown hub variant '" + variant + "'");
        }
    } else if (family == "l1sum") {
        s = l1_sum(space_from_json_obj(j.at("left")));
    } else {
        throw ConfigError("space config: unknown family '" + family + "'");
    }
    if (j.contains("scale")) s.scale = j.at("scale").get<double>();
    return s;
}

}  // namespace

std::string space_to_json(const SpaceHandle& space) { return space_to_json_obj(space).dump(2); }

SpaceHandle space_from_json(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("space config: ") + e.what());
    }
    try {
        return space_from_json_obj(j);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("space config: ") + e.what());
    }
}

}  // namespace knnlab
