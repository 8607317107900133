#pragma once

#include <filesystem>

#include <json.hpp>

#include "whitneydim/geometry.hpp"

namespace whitneydim {

// JSON layout:
//   { "dim": d,
//     "boxes": [ { "lo": ["p/q", ...], "side": ["p/q", ...] }, ... ],
//     "meta": { ..., "normalized": bool } }

nlohmann::json boxset_to_json(const BoxSet& set);
BoxSet boxset_from_json(const nlohmann::json& doc);

BoxSet read_boxset(const std::filesystem::path& path);
void write_boxset(const BoxSet& set, const std::filesystem::path& path);

}  // namespace whitneydim
