#ifndef GAZEKIT_DATASET_HPP
#define GAZEKIT_DATASET_HPP

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "gazekit/image.hpp"

namespace gazekit {

/// Landscape tablet screen with a centered 5x7 target grid.
struct ScreenGeometry {
    double width_cm = 22.62;
    double height_cm = 14.14;
    int grid_rows = 5;
    int grid_cols = 7;
    double dx_cm = 3.42;
    double dy_cm = 3.41;

    void validate() const {
        if (width_cm <= 0 || height_cm <= 0 || grid_rows <= 0 || grid_cols <= 0 || dx_cm <= 0 || dy_cm <= 0)
            throw std::invalid_argument("ScreenGeometry: fields must be strictly positive");
        if ((grid_cols - 1) * dx_cm > width_cm || (grid_rows - 1) * dy_cm > height_cm)
            throw std::invalid_argument("ScreenGeometry: grid does not fit on screen");
    }
};

struct GridIndex {
    int row = 0;
    int col = 0;

    int label(const ScreenGeometry& geom) const { return row * geom.grid_cols + col; }
    bool valid(const ScreenGeometry& geom) const {
        return row >= 0 && row < geom.grid_rows && col >= 0 && col < geom.grid_cols;
    }
};

/// Screen location in cm; origin top-left, x rightward, y downward.
struct GazePoint {
    double x_cm = 0.0;
    double y_cm = 0.0;
};

/// Grid is centered on the screen; margins absorb the leftover space.
inline GazePoint grid_to_screen(const GridIndex& g, const ScreenGeometry& geom) {
    if (!g.valid(geom)) throw std::domain_error("grid_to_screen: index out of range");
    double margin_x = (geom.width_cm - (geom.grid_cols - 1) * geom.dx_cm) / 2.0;
    double margin_y = (geom.height_cm - (geom.grid_rows - 1) * geom.dy_cm) / 2.0;
    return {margin_x + g.col * geom.dx_cm, margin_y + g.row * geom.dy_cm};
}

/// Steady-fixation window after a dot jump.
inline std::pair<double, double> chunk_window(double dot_onset_s) {
    if (dot_onset_s < 0) throw std::invalid_argument("chunk_window: negative onset");
    return {dot_onset_s + 1.5, dot_onset_s + 2.5};
}

enum class Posture { standing, sitting, slouching, lying };
enum class Race { caucasian, asian, other };

inline const char* to_string(Posture p) {
    switch (p) {
        case Posture::standing: return "standing";
        case Posture::sitting: return "sitting";
        case Posture::slouching: return "slouching";
        default: return "lying";
    }
}
inline const char* to_string(Race r) {
    switch (r) {
        case Race::caucasian: return "caucasian";
        case Race::asian: return "asian";
        default: return "other";
    }
}
inline Posture posture_from_string(const std::string& s) {
    if (s == "standing") return Posture::standing;
    if (s == "sitting") return Posture::sitting;
    if (s == "slouching") return Posture::slouching;
    if (s == "lying") return Posture::lying;
    throw std::invalid_argument("unknown posture: " + s);
}
inline Race race_from_string(const std::string& s) {
    if (s == "caucasian") return Race::caucasian;
    if (s == "asian") return Race::asian;
    if (s == "other") return Race::other;
    throw std::invalid_argument("unknown race: " + s);
}

struct SampleRecord {
    std::string subject_id;
    std::string session_id;
    Posture posture = Posture::sitting;
    bool glasses = false;
    Race race = Race::other;
    std::string frame_ref;  // path to the frame image
    GridIndex grid;
    double timestamp_s = 0.0;
};

enum class Provenance { real, synthetic };

struct Corpus {
    ScreenGeometry geometry;
    std::vector<SampleRecord> records;
    Provenance provenance = Provenance::real;

    void validate() const {
        geometry.validate();
        if (records.empty()) throw std::invalid_argument("Corpus: empty");
        std::set<std::tuple<std::string, std::string, std::string>> keys;
        std::map<std::pair<std::string, std::string>, Posture> session_posture;
        for (const auto& r : records) {
            if (!r.grid.valid(geometry)) throw std::invalid_argument("Corpus: grid label out of range");
            if (!keys.emplace(r.subject_id, r.session_id, r.frame_ref).second)
                throw std::invalid_argument("Corpus: duplicate (subject, session, frame) key");
            auto [it, fresh] = session_posture.try_emplace({r.subject_id, r.session_id}, r.posture);
            if (!fresh && it->second != r.posture)
                throw std::invalid_argument("Corpus: posture varies within a session");
        }
    }

    std::vector<std::string> subject_ids() const {
        std::vector<std::string> ids;
        for (const auto& r : records)
            if (std::find(ids.begin(), ids.end(), r.subject_id) == ids.end()) ids.push_back(r.subject_id);
        return ids;
    }
};

struct FrameSelection {
    std::vector<int> indices;
    bool short_chunk = false;  // chunk had fewer than k frames
};

/// Ranks frames by rank(mean intensity, ascending) + rank(mean |LoG|,
/// descending) and keeps the k best; ties break toward the lower index.
/// Dark, sharp frames win; bright (blink) or blurred frames lose.
inline FrameSelection select_frames(const std::vector<GrayImage>& chunk, int k = 5) {
    if (k < 1) throw std::invalid_argument("select_frames: k must be >= 1");
    FrameSelection sel;
    const int n = static_cast<int>(chunk.size());
    if (n < k) {
        sel.short_chunk = true;
        sel.indices.resize(n);
        std::iota(sel.indices.begin(), sel.indices.end(), 0);
        return sel;
    }
    static const Kernel log_k = log_kernel(1.4, 9);
    std::vector<double> intensity(n), sharpness(n);
    for (int i = 0; i < n; ++i) {
        intensity[i] = mean_intensity(chunk[i]);
        GrayImage resp = convolve(chunk[i], log_k);
        double s = 0.0;
        for (double v : resp.pixels) s += std::abs(v);
        sharpness[i] = s / resp.pixels.size();
    }
    auto ranks = [n](const std::vector<double>& key, bool ascending) {
        std::vector<int> order(n), rank(n);
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
            return ascending ? key[a] < key[b] : key[a] > key[b];
        });
        for (int r = 0; r < n; ++r) rank[order[r]] = r;
        return rank;
    };
    std::vector<int> ri = ranks(intensity, true);
    std::vector<int> rs = ranks(sharpness, false);
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return ri[a] + rs[a] < ri[b] + rs[b]; });
    sel.indices.assign(order.begin(), order.begin() + k);
    std::sort(sel.indices.begin(), sel.indices.end());
    return sel;
}

namespace detail {
inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    std::stringstream ss(line);
    while (std::getline(ss, cur, ',')) out.push_back(cur);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}
}  // namespace detail

inline constexpr const char* kManifestHeader =
    "subject_id,session_id,posture,glasses,race,frame_path,grid_row,grid_col,timestamp_s";

/// Loads and validates a manifest CSV. Frame paths are resolved relative
/// to the manifest's directory; each referenced file must exist.
inline Corpus load_manifest(const std::string& path,
                            ScreenGeometry geom = {},
                            bool check_frames = true) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_manifest: cannot open " + path);
    const auto base = std::filesystem::path(path).parent_path();

    Corpus corpus;
    corpus.geometry = geom;
    std::string line;
    int lineno = 0;
    if (!std::getline(in, line)) throw std::runtime_error("load_manifest: empty file " + path);
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kManifestHeader)
        throw std::runtime_error("load_manifest: bad header at line 1 of " + path);

    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto fields = detail::split_csv_line(line);
        auto fail = [&](const std::string& why) {
            throw std::runtime_error("load_manifest: " + path + ":" + std::to_string(lineno) + ": " + why);
        };
        if (fields.size() != 9) fail("expected 9 fields, got " + std::to_string(fields.size()));
        SampleRecord r;
        r.subject_id = fields[0];
        r.session_id = fields[1];
        try {
            r.posture = posture_from_string(fields[2]);
            r.race = race_from_string(fields[4]);
        } catch (const std::exception& e) {
            fail(e.what());
        }
        if (fields[3] != "0" && fields[3] != "1") fail("glasses must be 0 or 1");
        r.glasses = fields[3] == "1";
        r.frame_ref = (base / fields[5]).string();
        try {
            r.grid.row = std::stoi(fields[6]);
            r.grid.col = std::stoi(fields[7]);
            r.timestamp_s = std::stod(fields[8]);
        } catch (const std::exception&) {
            fail("non-numeric grid/timestamp field");
        }
        if (!r.grid.valid(geom))
            fail("grid label (" + fields[6] + "," + fields[7] + ") out of range");
        if (check_frames && !std::filesystem::exists(r.frame_ref))
            fail("missing frame file: " + r.frame_ref);
        corpus.records.push_back(std::move(r));
    }
    corpus.validate();
    return corpus;
}

inline void save_manifest(const Corpus& corpus, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("save_manifest: cannot open " + path);
    const auto base = std::filesystem::path(path).parent_path();
    out << kManifestHeader << "\n";
    for (const auto& r : corpus.records) {
        std::string rel = std::filesystem::relative(r.frame_ref, base).string();
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.3f", r.timestamp_s);
        out << r.subject_id << ',' << r.session_id << ',' << to_string(r.posture) << ','
            << (r.glasses ? 1 : 0) << ',' << to_string(r.race) << ',' << rel << ','
            << r.grid.row << ',' << r.grid.col << ',' << buf << "\n";
    }
}

}  // namespace gazekit

#endif
