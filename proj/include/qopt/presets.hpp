#pragma once

// Built-in preset models P1..P6, identical to presets/*.json.

#include "qopt/model_json.hpp"

#include <array>
#include <string>
#include <string_view>

namespace qopt {

struct Preset {
    std::string_view name;
    std::string_view json;
};

inline constexpr std::array<Preset, 6> presets{{
    {"P1", R"json({"dimension": 4, "family": "WeightedLinear", "lambda": [1.0, 1.0, 1.0, 1.0], "rational_weights": [["1", "1"], ["1", "1"], ["1", "1"], ["1", "1"]], "prefactor": 1.0})json"},
    {"P2", R"json({"dimension": 4, "family": "WeightedLinear", "lambda": [1.0, 1.0, 2.0, 4.0], "rational_weights": [["1", "1"], ["1", "1"], ["2", "1"], ["4", "1"]], "prefactor": 1.0})json"},
    {"P3", R"json({"dimension": 8, "family": "WeightedLinear", "lambda": [1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0], "rational_weights": [["1", "1"], ["1", "1"], ["1", "1"], ["1", "1"], ["1", "1"], ["1", "1"], ["1", "1"], ["1", "1"]], "prefactor": 1.0})json"},
    {"P4", R"json({"dimension": 8, "family": "WeightedLinear", "lambda": [4.0, 2.0, 1.0, 0.5, 0.25, 0.125, 0.0625, 0.03125], "rational_weights": [["4", "1"], ["2", "1"], ["1", "1"], ["1", "2"], ["1", "4"], ["1", "8"], ["1", "16"], ["1", "32"]], "prefactor": 1.0})json"},
    {"P5", R"json({"dimension": 8, "family": "SupAffine", "affine_terms": [{"offset": 0.0, "weights": [0.5, 0.5, 0.5, 0.5, 0.5, 0.5, 0.5, 0.5], "rational_weights": [["1", "2"], ["1", "2"], ["1", "2"], ["1", "2"], ["1", "2"], ["1", "2"], ["1", "2"], ["1", "2"]]}, {"offset": 0.0, "weights": [0.625, 0.3125, 0.3125, 0.3125, 0.3125, 0.3125, 0.3125, 0.3125], "rational_weights": [["5", "8"], ["5", "16"], ["5", "16"], ["5", "16"], ["5", "16"], ["5", "16"], ["5", "16"], ["5", "16"]]}, {"offset": 0.0, "weights": [0.3125, 0.625, 0.3125, 0.3125, 0.3125, 0.3125, 0.3125, 0.3125], "rational_weights": [["5", "16"], ["5", "8"], ["5", "16"], ["5", "16"], ["5", "16"], ["5", "16"], ["5", "16"], ["5", "16"]]}, {"offset": 0.0, "weights": [0.3125, 0.3125, 0.625, 0.3125, 0.3125, 0.3125, 0.3125, 0.3125], "rational_weights": [["5", "16"], ["5", "16"], ["5", "8"], ["5", "16"], ["5", "16"], ["5", "16"], ["5", "16"], ["5", "16"]]}, {"offset": 0.0, "weights": [0.3125, 0.3125, 0.3125, 0.625, 0.3125, 0.3125, 0.3125, 0.3125], "rational_weights": [["5", "16"], ["5", "16"], ["5", "16"], ["5", "8"], ["5", "16"], ["5", "16"], ["5", "16"], ["5", "16"]]}, {"offset": 0.0, "weights": [0.3125, 0.3125, 0.3125, 0.3125, 0.625, 0.3125, 0.3125, 0.3125], "rational_weights": [["5", "16"], ["5", "16"], ["5", "16"], ["5", "16"], ["5", "8"], ["5", "16"], ["5", "16"], ["5", "16"]]}, {"offset": 0.0, "weights": [0.3125, 0.3125, 0.3125, 0.3125, 0.3125, 0.625, 0.3125, 0.3125], "rational_weights": [["5", "16"], ["5", "16"], ["5", "16"], ["5", "16"], ["5", "16"], ["5", "8"], ["5", "16"], ["5", "16"]]}, {"offset": 0.0, "weights": [0.3125, 0.3125, 0.3125, 0.3125, 0.3125, 0.3125, 0.625, 0.3125], "rational_weights": [["5", "16"], ["5", "16"], ["5", "16"], ["5", "16"], ["5", "16"], ["5", "16"], ["5", "8"], ["5", "16"]]}, {"offset": 0.0, "weights": [0.3125, 0.3125, 0.3125, 0.3125, 0.3125, 0.3125, 0.3125, 0.625], "rational_weights": [["5", "16"], ["5", "16"], ["5", "16"], ["5", "16"], ["5", "16"], ["5", "16"], ["5", "16"], ["5", "8"]]}], "prefactor": 1.0})json"},
    {"P6", R"json({"dimension": 8, "family": "SupAffine", "affine_terms": [{"offset": 0.0, "weights": [0.2, 0.2, 0.2, 0.2, 0.2, 0.2, 0.2, 0.2], "rational_weights": [["1", "5"], ["1", "5"], ["1", "5"], ["1", "5"], ["1", "5"], ["1", "5"], ["1", "5"], ["1", "5"]]}, {"offset": 0.0, "weights": [0.25, 0.125, 0.125, 0.125, 0.125, 0.125, 0.125, 0.125], "rational_weights": [["1", "4"], ["1", "8"], ["1", "8"], ["1", "8"], ["1", "8"], ["1", "8"], ["1", "8"], ["1", "8"]]}, {"offset": 0.0, "weights": [0.125, 0.25, 0.125, 0.125, 0.125, 0.125, 0.125, 0.125], "rational_weights": [["1", "8"], ["1", "4"], ["1", "8"], ["1", "8"], ["1", "8"], ["1", "8"], ["1", "8"], ["1", "8"]]}, {"offset": 0.0, "weights": [0.125, 0.125, 0.25, 0.125, 0.125, 0.125, 0.125, 0.125], "rational_weights": [["1", "8"], ["1", "8"], ["1", "4"], ["1", "8"], ["1", "8"], ["1", "8"], ["1", "8"], ["1", "8"]]}, {"offset": 0.0, "weights": [0.125, 0.125, 0.125, 0.25, 0.125, 0.125, 0.125, 0.125], "rational_weights": [["1", "8"], ["1", "8"], ["1", "8"], ["1", "4"], ["1", "8"], ["1", "8"], ["1", "8"], ["1", "8"]]}, {"offset": 0.0, "weights": [0.125, 0.125, 0.125, 0.125, 0.25, 0.125, 0.125, 0.125], "rational_weights": [["1", "8"], ["1", "8"], ["1", "8"], ["1", "8"], ["1", "4"], ["1", "8"], ["1", "8"], ["1", "8"]]}, {"offset": 0.0, "weights": [0.125, 0.125, 0.125, 0.125, 0.125, 0.25, 0.125, 0.125], "rational_weights": [["1", "8"], ["1", "8"], ["1", "8"], ["1", "8"], ["1", "8"], ["1", "4"], ["1", "8"], ["1", "8"]]}, {"offset": 0.0, "weights": [0.125, 0.125, 0.125, 0.125, 0.125, 0.125, 0.25, 0.125], "rational_weights": [["1", "8"], ["1", "8"], ["1", "8"], ["1", "8"], ["1", "8"], ["1", "8"], ["1", "4"], ["1", "8"]]}, {"offset": 0.0, "weights": [0.125, 0.125, 0.125, 0.125, 0.125, 0.125, 0.125, 0.25], "rational_weights": [["1", "8"], ["1", "8"], ["1", "8"], ["1", "8"], ["1", "8"], ["1", "8"], ["1", "8"], ["1", "4"]]}], "prefactor": 1.0})json"},
}};

inline bool is_preset(std::string_view name) {
    for (const auto& p : presets)
        if (p.name == name) return true;
    return false;
}

inline BoundModel preset_model(std::string_view name) {
    for (const auto& p : presets)
        if (p.name == name) return model_from_string(std::string(p.json));
    throw ArgumentError("unknown preset \"" + std::string(name) + "\"");
}

/// A preset name or a path to a model JSON file.
inline BoundModel load_model(const std::string& spec) { return is_preset(spec) ? preset_model(spec) : model_from_file(spec); }

}  // namespace qopt
