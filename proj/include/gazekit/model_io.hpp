#ifndef GAZEKIT_MODEL_IO_HPP
#define GAZEKIT_MODEL_IO_HPP

#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include <zlib.h>

#include "gazekit/regress.hpp"

namespace gazekit {

// Versioned binary container: magic, version, payload, crc32 of
// version+payload. Little-endian scalars throughout.

inline constexpr char kModelMagic[8] = {'G', 'Z', 'K', 'M', 'O', 'D', 'L', '\0'};
inline constexpr std::uint32_t kModelVersion = 1;

namespace detail {

struct ByteWriter {
    std::vector<char> buf;

    template <typename T>
    void scalar(T v) {
        char tmp[sizeof(T)];
        std::memcpy(tmp, &v, sizeof(T));
        buf.insert(buf.end(), tmp, tmp + sizeof(T));
    }
    void u32(std::uint32_t v) { scalar(v); }
    void u64(std::uint64_t v) { scalar(v); }
    void f64(double v) { scalar(v); }
    void str(const std::string& s) {
        u64(s.size());
        buf.insert(buf.end(), s.begin(), s.end());
    }
    void doubles(const double* p, size_t n) {
        u64(n);
        const char* c = reinterpret_cast<const char*>(p);
        buf.insert(buf.end(), c, c + n * sizeof(double));
    }
    void matrix(const Matrix& m) {
        u64(m.rows());
        u64(m.cols());
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            for (Eigen::Index i = 0; i < m.rows(); ++i) f64(m(i, j));
    }
    void vector(const Vector& v) { doubles(v.data(), v.size()); }
};

struct ByteReader {
    const char* p;
    const char* end;

    template <typename T>
    T scalar() {
        if (p + sizeof(T) > end) throw std::runtime_error("model file truncated");
        T v;
        std::memcpy(&v, p, sizeof(T));
        p += sizeof(T);
        return v;
    }
    std::uint32_t u32() { return scalar<std::uint32_t>(); }
    std::uint64_t u64() { return scalar<std::uint64_t>(); }
    double f64() { return scalar<double>(); }
    std::string str() {
        size_t n = u64();
        if (p + n > end) throw std::runtime_error("model file truncated");
        std::string s(p, p + n);
        p += n;
        return s;
    }
    std::vector<double> doubles() {
        size_t n = u64();
        if (p + n * sizeof(double) > end) throw std::runtime_error("model file truncated");
        std::vector<double> v(n);
        std::memcpy(v.data(), p, n * sizeof(double));
        p += n * sizeof(double);
        return v;
    }
    Matrix matrix() {
        auto rows = static_cast<Eigen::Index>(u64());
        auto cols = static_cast<Eigen::Index>(u64());
        Matrix m(rows, cols);
        for (Eigen::Index j = 0; j < cols; ++j)
            for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = f64();
        return m;
    }
    Vector vector() {
        auto v = doubles();
        return Eigen::Map<Vector>(v.data(), v.size());
    }
};

inline void write_regressor(ByteWriter& w, const AxisRegressor& r) {
    if (std::holds_alternative<KnnModel>(r)) {
        const auto& m = std::get<KnnModel>(r);
        w.u32(0);
        w.u32(static_cast<std::uint32_t>(m.k));
        w.u64(m.points.size());
        w.u64(m.points.empty() ? 0 : m.points[0].size());
        for (const auto& p : m.points)
            for (double v : p) w.f64(v);
        for (double v : m.targets) w.f64(v);
    } else {
        const auto& m = std::get<RfModel>(r);
        w.u32(1);
        w.u32(static_cast<std::uint32_t>(m.dim));
        w.u32(static_cast<std::uint32_t>(m.params.n_trees));
        w.u32(static_cast<std::uint32_t>(m.params.mtry));
        w.u32(static_cast<std::uint32_t>(m.params.min_leaf));
        w.f64(m.params.bootstrap_fraction);
        w.u64(m.params.seed);
        w.u64(m.trees.size());
        for (const auto& t : m.trees) {
            w.u64(t.nodes.size());
            for (const auto& n : t.nodes) {
                w.u32(static_cast<std::uint32_t>(n.feature + 1));
                w.f64(n.threshold);
                w.u32(static_cast<std::uint32_t>(n.left + 1));
                w.u32(static_cast<std::uint32_t>(n.right + 1));
                w.f64(n.value);
            }
        }
    }
}

inline AxisRegressor read_regressor(ByteReader& r) {
    std::uint32_t tag = r.u32();
    if (tag == 0) {
        KnnModel m;
        m.k = static_cast<int>(r.u32());
        size_t n = r.u64(), dim = r.u64();
        m.points.assign(n, std::vector<double>(dim));
        for (auto& p : m.points)
            for (double& v : p) v = r.f64();
        m.targets.resize(n);
        for (double& v : m.targets) v = r.f64();
        return m;
    }
    if (tag != 1) throw std::runtime_error("model file: unknown regressor tag");
    RfModel m;
    m.dim = static_cast<int>(r.u32());
    m.params.n_trees = static_cast<int>(r.u32());
    m.params.mtry = static_cast<int>(r.u32());
    m.params.min_leaf = static_cast<int>(r.u32());
    m.params.bootstrap_fraction = r.f64();
    m.params.seed = r.u64();
    m.trees.resize(r.u64());
    for (auto& t : m.trees) {
        t.nodes.resize(r.u64());
        for (auto& n : t.nodes) {
            n.feature = static_cast<int>(r.u32()) - 1;
            n.threshold = r.f64();
            n.left = static_cast<int>(r.u32()) - 1;
            n.right = static_cast<int>(r.u32()) - 1;
            n.value = r.f64();
        }
    }
    return m;
}

}  // namespace detail

inline void save_model(const GazeModel& model, const std::string& path) {
    detail::ByteWriter w;
    w.u32(kModelVersion);
    w.str(to_string(model.descriptor));
    w.str(to_string(model.kind));
    w.u32(model.augmented ? 1 : 0);
    w.u64(model.fingerprint);
    w.u64(model.seed);
    w.u32(static_cast<std::uint32_t>(model.reduction.input_dim));
    w.u32(static_cast<std::uint32_t>(model.reduction.class_count));
    w.vector(model.reduction.pca_mean);
    w.matrix(model.reduction.pca_basis);
    w.matrix(model.reduction.lda_basis);
    detail::write_regressor(w, model.regressor_x);
    detail::write_regressor(w, model.regressor_y);

    std::uint32_t crc = static_cast<std::uint32_t>(
        crc32(0L, reinterpret_cast<const Bytef*>(w.buf.data()), static_cast<uInt>(w.buf.size())));

    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("save_model: cannot open " + path);
    out.write(kModelMagic, sizeof kModelMagic);
    out.write(w.buf.data(), static_cast<std::streamsize>(w.buf.size()));
    out.write(reinterpret_cast<const char*>(&crc), sizeof crc);
}

inline GazeModel load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("load_model: cannot open " + path);
    std::vector<char> data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (data.size() < sizeof kModelMagic + sizeof(std::uint32_t) * 2)
        throw std::runtime_error("load_model: file too short: " + path);
    if (std::memcmp(data.data(), kModelMagic, sizeof kModelMagic) != 0)
        throw std::runtime_error("load_model: bad magic in " + path);

    const char* payload = data.data() + sizeof kModelMagic;
    const size_t payload_len = data.size() - sizeof kModelMagic - sizeof(std::uint32_t);
    std::uint32_t stored_crc;
    std::memcpy(&stored_crc, data.data() + data.size() - sizeof stored_crc, sizeof stored_crc);
    std::uint32_t crc = static_cast<std::uint32_t>(
        crc32(0L, reinterpret_cast<const Bytef*>(payload), static_cast<uInt>(payload_len)));
    if (crc != stored_crc) throw std::runtime_error("load_model: checksum mismatch in " + path);

    detail::ByteReader r{payload, payload + payload_len};
    std::uint32_t version = r.u32();
    if (version != kModelVersion)
        throw std::runtime_error("load_model: unsupported format version " + std::to_string(version));

    GazeModel m;
    m.descriptor = descriptor_from_string(r.str());
    m.kind = regressor_from_string(r.str());
    m.augmented = r.u32() != 0;
    m.fingerprint = r.u64();
    m.seed = r.u64();
    m.reduction.input_dim = static_cast<int>(r.u32());
    m.reduction.class_count = static_cast<int>(r.u32());
    m.reduction.pca_mean = r.vector();
    m.reduction.pca_basis = r.matrix();
    m.reduction.lda_basis = r.matrix();
    m.regressor_x = detail::read_regressor(r);
    m.regressor_y = detail::read_regressor(r);
    return m;
}

}  // namespace gazekit

#endif
