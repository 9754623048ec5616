#ifndef GAZEKIT_SYNTH_HPP
#define GAZEKIT_SYNTH_HPP

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "gazekit/dataset.hpp"
#include "gazekit/eyes.hpp"
#include "gazekit/rng.hpp"

namespace gazekit {

/// Desk-scale synthetic corpus: eyes rendered as bright sclera ellipses
/// with a dark iris whose in-box offset is an affine function of the
/// gaze point. The affine map is retained so closed-form oracles exist.
struct SynthParams {
    int n_subjects = 8;
    int sessions_per_subject = 1;
    int frames_per_point = 3;
    std::uint64_t seed = 0;
    ScreenGeometry geometry;
    int frame_width = 320;
    int frame_height = 240;
    double glare_strength = 0.0;  // extra glare noise on glasses-wearing subjects
};

/// Per-subject ground truth of the generator.
struct SynthSubjectTruth {
    double gain_x = 0.0;  // iris x offset (box fraction) per cm of gaze x
    double gain_y = 0.0;
    double center_x_cm = 0.0;  // gaze point mapping to a centered iris
    double center_y_cm = 0.0;
};

struct SynthCorpus {
    Corpus corpus;                                   // frame_ref is a relative virtual path
    std::vector<GrayImage> frames;                   // parallel to corpus.records
    std::vector<std::vector<BoundingBox>> candidates;  // detector-style boxes per frame
    std::vector<SynthSubjectTruth> truth;            // per subject
    SynthParams params;
};

namespace detail {

struct SynthSubject {
    double base_brightness;
    int box_size;
    double right_cx, right_cy;  // image-left eye (subject's right)
    double left_cx, left_cy;
    double iris_aspect;
    SynthSubjectTruth truth;
    bool glasses;
    Race race;
};

inline SynthSubject make_subject(const SynthParams& p, int index) {
    auto rng = make_rng(p.seed, "subject/" + std::to_string(index));
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    SynthSubject s;
    s.base_brightness = 0.45 + 0.15 * u01(rng);
    // fixed at 50 so the 100x100 resize is an exact 2x upsample:
    // integer-pixel iris shifts then translate the crop content exactly,
    // keeping each session's crop-mean series blink-free by construction
    s.box_size = 50;
    double jx = (u01(rng) - 0.5) * 24, jy = (u01(rng) - 0.5) * 24;
    s.right_cx = p.frame_width * 0.28 + jx;
    s.right_cy = p.frame_height * 0.45 + jy;
    s.left_cx = p.frame_width * 0.72 + jx + (u01(rng) - 0.5) * 8;
    s.left_cy = s.right_cy + (u01(rng) - 0.5) * 6;
    s.iris_aspect = 0.85 + 0.2 * u01(rng);
    s.truth.gain_x = 0.012 * (0.97 + 0.06 * u01(rng));
    s.truth.gain_y = 0.008 * (0.97 + 0.06 * u01(rng));
    s.truth.center_x_cm = p.geometry.width_cm / 2.0;
    s.truth.center_y_cm = p.geometry.height_cm / 2.0;
    s.glasses = index % 2 == 0;
    s.race = static_cast<Race>(index % 3);
    return s;
}

inline void fill_disk(GrayImage& img, double cx, double cy, double rx, double ry, double value) {
    int x0 = std::max(0, static_cast<int>(cx - rx - 1));
    int x1 = std::min(img.width - 1, static_cast<int>(cx + rx + 1));
    int y0 = std::max(0, static_cast<int>(cy - ry - 1));
    int y1 = std::min(img.height - 1, static_cast<int>(cy + ry + 1));
    for (int y = y0; y <= y1; ++y)
        for (int x = x0; x <= x1; ++x) {
            double dx = (x - cx) / rx, dy = (y - cy) / ry;
            if (dx * dx + dy * dy <= 1.0) img.at(x, y) = value;
        }
}

inline void render_eye(GrayImage& frame, const SynthSubject& s, const BoundingBox& box,
                       double fx, double fy, double glare, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    const double bx = box.x, by = box.y, w = box.w, h = box.h;
    // sclera
    fill_disk(frame, bx + 0.5 * w, by + 2.0 / 3.0 * h, 0.48 * w, 0.30 * h, s.base_brightness + 0.30);
    // iris + pupil; the offset is snapped to whole pixels so the disk
    // raster translates without changing its pixel count
    double ix = bx + std::lround(fx * w), iy = by + std::lround(fy * h);
    fill_disk(frame, ix, iy, 0.16 * w, 0.06 * w * s.iris_aspect, s.base_brightness - 0.25);
    fill_disk(frame, ix, iy, 0.06 * w, 0.03 * w * s.iris_aspect, std::max(0.02, s.base_brightness - 0.40));
    if (glare > 0.0) {
        int blobs = 1 + static_cast<int>(u01(rng) * 2.999);
        for (int b = 0; b < blobs; ++b) {
            double gx = bx + (0.2 + 0.6 * u01(rng)) * w;
            double gy = by + (0.3 + 0.5 * u01(rng)) * h;
            fill_disk(frame, gx, gy, (0.04 + 0.06 * u01(rng)) * w * glare,
                      (0.04 + 0.06 * u01(rng)) * h * glare, 0.95);
        }
    }
}

}  // namespace detail

inline SynthCorpus synth_generate(const SynthParams& params) {
    if (params.n_subjects < 2) throw std::invalid_argument("synth_generate: need at least 2 subjects");
    params.geometry.validate();

    SynthCorpus out;
    out.params = params;
    out.corpus.geometry = params.geometry;
    out.corpus.provenance = Provenance::synthetic;

    static const Posture postures[4] = {Posture::standing, Posture::sitting, Posture::slouching,
                                        Posture::lying};

    for (int si = 0; si < params.n_subjects; ++si) {
        auto subj = detail::make_subject(params, si);
        out.truth.push_back(subj.truth);
        char sid[16];
        std::snprintf(sid, sizeof sid, "s%02d", si);

        for (int sess = 0; sess < params.sessions_per_subject; ++sess) {
            char pid[16];
            std::snprintf(pid, sizeof pid, "p%d", sess);
            auto rng = make_rng(params.seed,
                                "session/" + std::string(sid) + "/" + std::to_string(sess));
            std::normal_distribution<double> gauss(0.0, 1.0);
            std::uniform_real_distribution<double> u01(0.0, 1.0);
            int frame_counter = 0;

            for (int row = 0; row < params.geometry.grid_rows; ++row) {
                for (int col = 0; col < params.geometry.grid_cols; ++col) {
                    GazePoint target = grid_to_screen({row, col}, params.geometry);
                    for (int f = 0; f < params.frames_per_point; ++f, ++frame_counter) {
                        GrayImage frame(params.frame_width, params.frame_height,
                                        subj.base_brightness);
                        int jx = static_cast<int>(std::lround(gauss(rng)));
                        int jy = static_cast<int>(std::lround(gauss(rng)));
                        // light background texture, kept clear of the eye
                        // boxes so the crops stay noise-free
                        auto near_eye = [&](double x, double y) {
                            double m = subj.box_size / 2.0 + 6.0;
                            return (std::abs(x - subj.right_cx) < m && std::abs(y - subj.right_cy) < m) ||
                                   (std::abs(x - subj.left_cx) < m && std::abs(y - subj.left_cy) < m);
                        };
                        for (int i = 0; i < params.frame_width * params.frame_height / 40; ++i) {
                            int x = static_cast<int>(u01(rng) * params.frame_width);
                            int y = static_cast<int>(u01(rng) * params.frame_height);
                            x = std::min(x, frame.width - 1);
                            y = std::min(y, frame.height - 1);
                            double dv = 0.03 * gauss(rng);
                            if (!near_eye(x, y)) frame.at(x, y) += dv;
                        }
                        BoundingBox rbox{static_cast<int>(subj.right_cx - subj.box_size / 2.0) + jx,
                                         static_cast<int>(subj.right_cy - subj.box_size / 2.0) + jy,
                                         subj.box_size, subj.box_size, EyeSide::right};
                        BoundingBox lbox{static_cast<int>(subj.left_cx - subj.box_size / 2.0) + jx,
                                         static_cast<int>(subj.left_cy - subj.box_size / 2.0) + jy,
                                         subj.box_size, subj.box_size, EyeSide::left};
                        double fx = 0.5 + subj.truth.gain_x * (target.x_cm - subj.truth.center_x_cm) +
                                    0.002 * gauss(rng);
                        double fy = 2.0 / 3.0 +
                                    subj.truth.gain_y * (target.y_cm - subj.truth.center_y_cm) +
                                    0.002 * gauss(rng);
                        double glare = subj.glasses ? params.glare_strength : 0.0;
                        detail::render_eye(frame, subj, rbox, fx, fy, glare, rng);
                        detail::render_eye(frame, subj, lbox, fx, fy, glare, rng);

                        SampleRecord rec;
                        rec.subject_id = sid;
                        rec.session_id = pid;
                        rec.posture = postures[sess % 4];
                        rec.glasses = subj.glasses;
                        rec.race = subj.race;
                        char fref[64];
                        std::snprintf(fref, sizeof fref, "frames/%s_%s_f%04d.png", sid, pid,
                                      frame_counter);
                        rec.frame_ref = fref;
                        rec.grid = {row, col};
                        rec.timestamp_s = frame_counter / 5.0;
                        out.corpus.records.push_back(rec);
                        out.frames.push_back(std::move(frame));
                        out.candidates.push_back({lbox, rbox});
                    }
                }
            }
        }
    }
    return out;
}

}  // namespace gazekit

#endif
