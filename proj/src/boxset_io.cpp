#include "whitneydim/boxset_io.hpp"

#include <fstream>
#include <sstream>

#include "whitneydim/error.hpp"

namespace whitneydim {

nlohmann::json boxset_to_json(const BoxSet& set) {
    nlohmann::json boxes = nlohmann::json::array();
    for (const auto& b : set.boxes()) {
        nlohmann::json lo = nlohmann::json::array(), side = nlohmann::json::array();
        for (int a = 0; a < set.dim(); ++a) {
            lo.push_back(b.lo[a].to_string());
            side.push_back(b.side[a].to_string());
        }
        boxes.push_back({{"lo", std::move(lo)}, {"side", std::move(side)}});
    }
    nlohmann::json meta = set.meta();
    meta["normalized"] = set.normalized();
    return {{"dim", set.dim()}, {"boxes", std::move(boxes)}, {"meta", std::move(meta)}};
}

BoxSet boxset_from_json(const nlohmann::json& doc) {
    try {
        if (!doc.is_object() || !doc.contains("dim") || !doc.contains("boxes"))
            throw Error(ErrorKind::format, "box set JSON needs 'dim' and 'boxes'");
        const int dim = doc.at("dim").get<int>();
        if (dim < 1 || dim > kMaxDim) throw Error(ErrorKind::format, "unsupported 'dim'");
        auto read_coord = [](const nlohmann::json& v) {
            if (v.is_string()) return Rational::parse(v.get<std::string>());
            if (v.is_number_integer()) return Rational(v.get<std::int64_t>());
            throw Error(ErrorKind::format, "coordinates must be rational strings \"p/q\"");
        };
        std::vector<RationalBox> boxes;
        for (const auto& jb : doc.at("boxes")) {
            const auto& lo = jb.at("lo");
            const auto& side = jb.at("side");
            if (static_cast<int>(lo.size()) != dim || static_cast<int>(side.size()) != dim)
                throw Error(ErrorKind::format, "box arity does not match 'dim'");
            RationalBox b;
            for (int a = 0; a < dim; ++a) {
                b.lo[a] = read_coord(lo[a]);
                b.side[a] = read_coord(side[a]);
            }
            boxes.push_back(b);
        }
        nlohmann::json meta = doc.value("meta", nlohmann::json::object());
        bool normalized = meta.is_object() && meta.value("normalized", false);
        if (meta.is_object()) meta.erase("normalized");
        return BoxSet(dim, std::move(boxes), normalized, std::move(meta));
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::format, std::string("box set JSON: ") + e.what());
    }
}

BoxSet read_boxset(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::config, "cannot open box set file " + path.string());
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::format, path.string() + ": " + e.what());
    }
    return boxset_from_json(doc);
}

void write_boxset(const BoxSet& set, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorKind::io, "cannot write " + path.string());
    out << boxset_to_json(set).dump() << '\n';
    if (!out) throw Error(ErrorKind::io, "write failed for " + path.string());
}

}  // namespace whitneydim
