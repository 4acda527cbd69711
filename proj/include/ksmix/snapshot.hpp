#pragma once
#include <string>

#include <json.hpp>

#include "ksmix/field.hpp"

namespace ksmix {

// Field snapshot = <base>.json sidecar (grid shape, time, free-form meta) plus
// <base>.f64 with the raw row-major float64 little-endian samples.
struct Snapshot {
    ScalarField field;
    double t = 0.0;
    nlohmann::json meta;
};

void write_snapshot(const std::string& base_path, const ScalarField& f, double t,
                    const nlohmann::json& meta = nlohmann::json::object());

// Accepts the base path or the .json path.
Snapshot read_snapshot(const std::string& path);

}  // namespace ksmix
