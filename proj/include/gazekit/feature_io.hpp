#ifndef GAZEKIT_FEATURE_IO_HPP
#define GAZEKIT_FEATURE_IO_HPP

#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "gazekit/features.hpp"

namespace gazekit {

/// Feature dump: one JSON header line (descriptor, layout, count),
/// then count*length little-endian float32 values.
struct FeatureDump {
    Descriptor descriptor = Descriptor::mhog;
    size_t length = 0;
    size_t per_eye_len = 0;
    std::vector<std::vector<float>> rows;
};

inline void save_features(const FeatureDump& dump, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("save_features: cannot open " + path);
    nlohmann::json header;
    header["descriptor"] = to_string(dump.descriptor);
    header["length"] = dump.length;
    header["per_eye_len"] = dump.per_eye_len;
    header["count"] = dump.rows.size();
    out << header.dump() << "\n";
    for (const auto& row : dump.rows) {
        if (row.size() != dump.length) throw std::invalid_argument("save_features: row length mismatch");
        out.write(reinterpret_cast<const char*>(row.data()),
                  static_cast<std::streamsize>(row.size() * sizeof(float)));
    }
}

inline FeatureDump load_features(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("load_features: cannot open " + path);
    std::string header_line;
    if (!std::getline(in, header_line)) throw std::runtime_error("load_features: missing header");
    auto header = nlohmann::json::parse(header_line);
    FeatureDump dump;
    dump.descriptor = descriptor_from_string(header.at("descriptor").get<std::string>());
    dump.length = header.at("length").get<size_t>();
    dump.per_eye_len = header.at("per_eye_len").get<size_t>();
    size_t count = header.at("count").get<size_t>();
    dump.rows.assign(count, std::vector<float>(dump.length));
    for (auto& row : dump.rows) {
        in.read(reinterpret_cast<char*>(row.data()),
                static_cast<std::streamsize>(row.size() * sizeof(float)));
        if (!in) throw std::runtime_error("load_features: truncated data in " + path);
    }
    return dump;
}

}  // namespace gazekit

#endif
